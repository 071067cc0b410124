#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace histscan {

/// Inclusive integer interval; a missing bound is open.
struct Range {
    std::optional<int> lo;
    std::optional<int> hi;

    bool unbounded() const { return !lo && !hi; }
    bool admits(int value) const { return (!lo || *lo <= value) && (!hi || value <= *hi); }
    bool intersects(const Range& other) const;
    std::optional<int> midpoint() const;

    bool operator==(const Range&) const = default;
};

struct BibstemEntry {
    std::string stem;
    std::string full_title;
    std::string series;  // empty when the publication has no series designation
    Range years;
    Range volumes;
    std::optional<std::string> predecessor;
    std::optional<std::string> successor;

    bool operator==(const BibstemEntry&) const = default;
};

/// Case-insensitive, whitespace-collapsed form used for title and series matching.
std::string normalize_title(std::string_view title);

struct RegistryUpdate;

/// Immutable snapshot of the journal-abbreviation registry.
///
/// The registry remembers the layout of the file it was loaded from
/// (comment and blank lines, entry order) so that serialize() reproduces a
/// canonical input byte for byte.
class Registry {
public:
    Registry() = default;

    /// Throws ParseError, DuplicateStem, OverlappingRanges, BrokenContinuityLink.
    static Registry load(std::string_view content);
    std::string serialize() const;

    const std::vector<BibstemEntry>& entries() const { return entries_; }
    const BibstemEntry* find(std::string_view stem) const;
    std::uint64_t version() const { return version_; }
    std::size_t size() const { return entries_.size(); }

    /// Throws NotFound or Ambiguous.
    std::string resolve(std::string_view title, std::optional<std::string_view> series = std::nullopt,
                        std::optional<int> year = std::nullopt, std::optional<int> volume = std::nullopt) const;

    /// Adds an entry, linking the named predecessor/successor back to it.
    RegistryUpdate add(BibstemEntry entry) const;

    /// Oldest-first predecessor/successor chain through `stem`. Throws NotFound.
    std::vector<std::string> continuity_chain(std::string_view stem) const;

private:
    void check_invariants() const;
    std::size_t index_of(std::string_view stem) const;

    // A file line is either kept verbatim (comments, blanks) or an entry index.
    std::vector<std::variant<std::string, std::size_t>> lines_;
    std::vector<BibstemEntry> entries_;
    std::uint64_t version_ = 0;
};

struct RegistryUpdate {
    Registry registry;
    std::string audit_line;
};

inline Registry load_registry(std::string_view content) { return Registry::load(content); }

inline std::string resolve_stem(const Registry& registry, std::string_view title,
                                std::optional<std::string_view> series = std::nullopt,
                                std::optional<int> year = std::nullopt, std::optional<int> volume = std::nullopt) {
    return registry.resolve(title, series, year, volume);
}

inline RegistryUpdate register_stem(const Registry& registry, BibstemEntry entry) {
    return registry.add(std::move(entry));
}

inline std::vector<std::string> continuity_chain(const Registry& registry, std::string_view stem) {
    return registry.continuity_chain(stem);
}

std::string format_registry_line(const BibstemEntry& entry);

}  // namespace histscan
