#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "histscan/error.hpp"
#include "histscan/page_label.hpp"

namespace histscan {

/// The single-character m field of a bibcode.
///
/// 'L' flags a Letter, A-P (other than L) carry printed page-letter
/// designations such as the D of "D:305", and Q-Z are reserved for
/// separating otherwise identical codes. '.' means no qualifier.
class Qualifier {
public:
    enum class Kind { None, Letter, PageDesignator, Dedup };

    constexpr Qualifier() = default;

    static constexpr Qualifier none() { return {}; }
    static constexpr Qualifier letter() { return Qualifier(Kind::Letter, 'L'); }
    static Qualifier page_designator(char c);
    static Qualifier dedup(char c);
    /// Interprets a raw m-field character. Throws Error(InvalidQualifier).
    static Qualifier from_char(char c);

    constexpr Kind kind() const { return kind_; }
    constexpr char code() const { return code_; }
    constexpr bool is_none() const { return kind_ == Kind::None; }

    bool operator==(const Qualifier&) const = default;

private:
    constexpr Qualifier(Kind kind, char code) : kind_(kind), code_(code) {}

    Kind kind_ = Kind::None;
    char code_ = '.';
};

/// The vvvv field: a journal volume number or a 4-letter lowercase
/// publication-type code such as "conf".
class VolumeField {
public:
    VolumeField() = default;
    static VolumeField number(int n) { return VolumeField(n); }
    static VolumeField type_code(std::string code) { return VolumeField(std::move(code)); }
    /// "12" -> number 12, "conf" -> type code. Throws Error(InvalidVolume).
    static VolumeField from_text(std::string_view text);

    bool is_number() const { return std::holds_alternative<int>(value_); }
    int number() const { return std::get<int>(value_); }
    const std::string& type_code() const { return std::get<std::string>(value_); }
    std::string text() const;

    bool operator==(const VolumeField&) const = default;

private:
    explicit VolumeField(int n) : value_(n) {}
    explicit VolumeField(std::string code) : value_(std::move(code)) {}

    std::variant<int, std::string> value_{1};
};

/// A decomposed yyyyjjjjjvvvvmppppa identifier.
struct Bibcode {
    int year = 0;
    std::string bibstem;
    VolumeField volume;
    Qualifier qualifier;
    int page = 0;
    std::optional<char> author_initial;

    bool operator==(const Bibcode&) const = default;
};

inline constexpr std::size_t kBibcodeLength = 19;

using CodeSet = std::set<std::string, std::less<>>;

bool is_valid_bibstem(std::string_view stem);

/// Throws Error with the code of the first violated field invariant.
std::string format_bibcode(const Bibcode& bibcode);
Bibcode parse_bibcode(std::string_view text);

struct Diagnostic {
    ErrorCode code;
    std::size_t first;  // inclusive character offsets
    std::size_t last;
    std::string message;
};

/// Empty iff parse_bibcode(text) succeeds. A wrong-length string yields a
/// single WrongLength diagnostic; otherwise each bad field is reported once.
std::vector<Diagnostic> validate_bibcode_string(std::string_view text);

/// Returns the candidate unchanged when its code is unused, otherwise the
/// candidate carrying the first free dedup letter Q..Z.
/// Throws QualifierOccupied when a colliding candidate already uses the m
/// field for a Letter or page designator, DedupExhausted when Q..Z are all taken.
Bibcode assign_dedup_qualifier(const CodeSet& existing, const Bibcode& candidate);

/// First letter of a surname, ASCII-folded and uppercased. nullopt when the
/// first character does not fold to a letter.
std::optional<char> author_initial(std::string_view last_name);

struct NormalizedPage {
    Qualifier qualifier;
    int page = 0;
    std::optional<int> sublabel;

    bool operator==(const NormalizedPage&) const = default;
};

/// Maps a page label onto the bibcode (qualifier, page) fields.
/// Throws UnsupportedForBibcode for roman, plate and unnumbered labels and
/// for letters that cannot act as page designators; InvalidPage above 9999.
NormalizedPage to_bibcode_page(const PageLabel& label);

/// parse_page_label followed by to_bibcode_page.
NormalizedPage normalize_page_label(std::string_view raw);

}  // namespace histscan
