#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace histscan {

enum class LabelKind { Arabic, Roman, LetterPrefixed, Composite, Plate, Unnumbered };

std::string_view to_string(LabelKind kind) noexcept;
LabelKind label_kind_from_string(std::string_view text);

/// A typed printed page designation.
///
///   Arabic          "305"            primary = 305
///   Roman           "xiv" / "XIV"    primary = 14
///   LetterPrefixed  "D4" / "D:305"   letter = 'D', primary = page
///   Composite       "1.8"            primary = 1, secondary = 8
///   Plate           "plate [n]"      primary = ordinal (0 until bound to a scan)
///   Unnumbered      "unnumbered [n]" primary = ordinal (0 until bound to a scan)
///
/// Identity (and therefore volume uniqueness) is (kind, letter, primary,
/// secondary); the case of a roman numeral is presentation only.
struct PageLabel {
    LabelKind kind = LabelKind::Arabic;
    char letter = 0;
    int primary = 0;
    int secondary = 0;
    bool upper_roman = false;

    static PageLabel arabic(int n) { return {LabelKind::Arabic, 0, n, 0, false}; }
    static PageLabel roman(int n, bool upper = false) { return {LabelKind::Roman, 0, n, 0, upper}; }
    static PageLabel lettered(char letter, int n) { return {LabelKind::LetterPrefixed, letter, n, 0, false}; }
    static PageLabel composite(int a, int b) { return {LabelKind::Composite, 0, a, b, false}; }
    static PageLabel plate(int ordinal = 0) { return {LabelKind::Plate, 0, ordinal, 0, false}; }
    static PageLabel unnumbered(int ordinal = 0) { return {LabelKind::Unnumbered, 0, ordinal, 0, false}; }

    auto key() const { return std::tuple(kind, letter, primary, secondary); }
    bool same_page(const PageLabel& other) const { return key() == other.key(); }

    /// Plate and unnumbered labels need an ordinal before they can be stored.
    bool needs_ordinal() const {
        return (kind == LabelKind::Plate || kind == LabelKind::Unnumbered) && primary == 0;
    }

    bool operator==(const PageLabel&) const = default;
};

/// Parses printed page text. Accepted forms: decimal digits, capital
/// letter + digits, capital letter + ':' + digits, digits '.' digits, roman
/// numerals (one case throughout, canonical subtractive form, 1-3999), and
/// the keywords "plate" / "unnumbered" with an optional ordinal.
/// Throws Error(Unparseable).
PageLabel parse_page_label(std::string_view text);

/// Canonical text; parse_page_label(format_page_label(l)) == l.
std::string format_page_label(const PageLabel& label);

/// Successor within the label's own numbering sequence, if it has one.
std::optional<PageLabel> next_label(const PageLabel& label);

std::optional<int> roman_to_int(std::string_view text);
std::string int_to_roman(int value, bool upper = false);

}  // namespace histscan
