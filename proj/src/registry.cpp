#include "histscan/registry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>

#include "histscan/bibcode.hpp"
#include "histscan/error.hpp"
#include "histscan/tsv.hpp"

namespace histscan {

namespace {

constexpr std::size_t kColumns = 9;

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& what) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what,
                {{"line", line}, {"column", column}});
}

std::optional<int> parse_bound(std::string_view field, std::size_t line, std::size_t column) {
    if (field.empty()) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0 || field.front() == '+' ||
        (field.size() > 1 && field.front() == '0'))
        parse_error(line, column, "expected a non-negative integer, got '" + std::string(field) + "'");
    return value;
}

std::string format_bound(const std::optional<int>& bound) { return bound ? std::to_string(*bound) : std::string(); }

std::optional<std::string> optional_field(std::string_view field) {
    if (field.empty()) return std::nullopt;
    return std::string(field);
}

std::string describe(const BibstemEntry& e) {
    return e.series.empty() ? e.full_title : e.full_title + ", " + e.series;
}

}  // namespace

bool Range::intersects(const Range& other) const {
    constexpr int kMin = std::numeric_limits<int>::min();
    constexpr int kMax = std::numeric_limits<int>::max();
    return std::max(lo.value_or(kMin), other.lo.value_or(kMin)) <= std::min(hi.value_or(kMax), other.hi.value_or(kMax));
}

std::optional<int> Range::midpoint() const {
    if (lo && hi) return *lo + (*hi - *lo) / 2;
    if (lo) return lo;
    return hi;
}

std::string normalize_title(std::string_view title) {
    std::string out;
    bool pending_space = false;
    for (char c : title) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string format_registry_line(const BibstemEntry& e) {
    return join_tsv({e.stem, e.full_title, e.series, format_bound(e.years.lo), format_bound(e.years.hi),
                     format_bound(e.volumes.lo), format_bound(e.volumes.hi), e.predecessor.value_or(""),
                     e.successor.value_or("")});
}

Registry Registry::load(std::string_view content) {
    Registry registry;
    std::size_t line_no = 0;
    for (auto line : split_lines(content)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            registry.lines_.emplace_back(std::string(line));
            continue;
        }
        auto fields = split_tsv(line);
        if (fields.size() != kColumns)
            parse_error(line_no, std::min(fields.size(), kColumns) + 1,
                        "expected " + std::to_string(kColumns) + " tab-separated columns, got " +
                            std::to_string(fields.size()));
        BibstemEntry e;
        e.stem = std::string(fields[0]);
        if (!is_valid_bibstem(e.stem)) parse_error(line_no, 1, "invalid stem '" + e.stem + "'");
        e.full_title = std::string(fields[1]);
        if (normalize_title(e.full_title).empty()) parse_error(line_no, 2, "empty title");
        e.series = std::string(fields[2]);
        e.years = {parse_bound(fields[3], line_no, 4), parse_bound(fields[4], line_no, 5)};
        e.volumes = {parse_bound(fields[5], line_no, 6), parse_bound(fields[6], line_no, 7)};
        if (e.years.lo && e.years.hi && *e.years.lo > *e.years.hi) parse_error(line_no, 4, "year range is reversed");
        if (e.volumes.lo && e.volumes.hi && *e.volumes.lo > *e.volumes.hi)
            parse_error(line_no, 6, "volume range is reversed");
        e.predecessor = optional_field(fields[7]);
        e.successor = optional_field(fields[8]);
        if (registry.find(e.stem))
            throw Error(ErrorCode::DuplicateStem, "stem '" + e.stem + "' appears twice (line " + std::to_string(line_no) + ")",
                        {{"stem", e.stem}, {"line", line_no}});
        registry.lines_.emplace_back(registry.entries_.size());
        registry.entries_.push_back(std::move(e));
    }
    registry.check_invariants();
    return registry;
}

std::string Registry::serialize() const {
    std::string out;
    for (const auto& line : lines_) {
        if (const auto* raw = std::get_if<std::string>(&line))
            out += *raw;
        else
            out += format_registry_line(entries_[std::get<std::size_t>(line)]);
        out += '\n';
    }
    return out;
}

const BibstemEntry* Registry::find(std::string_view stem) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.stem == stem; });
    return it == entries_.end() ? nullptr : &*it;
}

std::size_t Registry::index_of(std::string_view stem) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].stem == stem) return i;
    throw Error(ErrorCode::NotFound, "no stem '" + std::string(stem) + "'", {{"stem", std::string(stem)}});
}

void Registry::check_invariants() const {
    std::set<std::string_view> stems;
    for (const auto& e : entries_)
        if (!stems.insert(e.stem).second)
            throw Error(ErrorCode::DuplicateStem, "stem '" + e.stem + "' appears twice", {{"stem", e.stem}});

    auto broken = [](const BibstemEntry& e, const std::string& why) {
        throw Error(ErrorCode::BrokenContinuityLink, e.stem + ": " + why, {{"stem", e.stem}});
    };
    for (const auto& e : entries_) {
        if (e.successor) {
            const auto* next = find(*e.successor);
            if (!next) broken(e, "successor '" + *e.successor + "' is not registered");
            if (next->predecessor != e.stem) broken(e, "successor '" + *e.successor + "' does not link back");
        }
        if (e.predecessor) {
            const auto* prev = find(*e.predecessor);
            if (!prev) broken(e, "predecessor '" + *e.predecessor + "' is not registered");
            if (prev->successor != e.stem) broken(e, "predecessor '" + *e.predecessor + "' does not link back");
        }
        // Walk forward; symmetric links plus a bounded walk rule out cycles.
        const BibstemEntry* cursor = &e;
        for (std::size_t steps = 0; cursor->successor; ++steps) {
            if (steps >= entries_.size() || *cursor->successor == e.stem) broken(e, "continuity links form a cycle");
            cursor = find(*cursor->successor);
        }
    }

    for (std::size_t i = 0; i < entries_.size(); ++i) {
        for (std::size_t j = i + 1; j < entries_.size(); ++j) {
            const auto& a = entries_[i];
            const auto& b = entries_[j];
            if (normalize_title(a.full_title) != normalize_title(b.full_title)) continue;
            if (normalize_title(a.series) != normalize_title(b.series)) continue;
            if (a.years.intersects(b.years) && a.volumes.intersects(b.volumes))
                throw Error(ErrorCode::OverlappingRanges,
                            "'" + a.stem + "' and '" + b.stem + "' cover the same title, series and ranges",
                            {{"stems", {a.stem, b.stem}}});
        }
    }
}

std::string Registry::resolve(std::string_view title, std::optional<std::string_view> series, std::optional<int> year,
                              std::optional<int> volume) const {
    auto wanted = normalize_title(title);
    std::vector<const BibstemEntry*> candidates;
    for (const auto& e : entries_)
        if (normalize_title(e.full_title) == wanted) candidates.push_back(&e);

    nlohmann::json query = {{"title", std::string(title)}};
    if (series) query["series"] = std::string(*series);
    if (year) query["year"] = *year;
    if (volume) query["volume"] = *volume;
    auto not_found = [&] { throw Error(ErrorCode::NotFound, "no stem for " + query.dump(), query); };
    if (candidates.empty()) not_found();

    // The series designation is the primary discriminator of a split family.
    auto wanted_series = normalize_title(series.value_or(""));
    std::vector<const BibstemEntry*> by_series;
    for (const auto* e : candidates)
        if (normalize_title(e->series) == wanted_series) by_series.push_back(e);
    if (by_series.empty() && !series) by_series = candidates;
    if (by_series.empty()) not_found();
    if (by_series.size() == 1) return by_series.front()->stem;

    std::vector<const BibstemEntry*> admitted;
    for (const auto* e : by_series)
        if ((!year || e->years.admits(*year)) && (!volume || e->volumes.admits(*volume))) admitted.push_back(e);
    if (admitted.empty()) not_found();
    if (admitted.size() > 1) {
        query["candidates"] = nlohmann::json::array();
        for (const auto* e : admitted) query["candidates"].push_back(e->stem);
        throw Error(ErrorCode::Ambiguous, std::to_string(admitted.size()) + " stems admit " + query.dump(), query);
    }
    return admitted.front()->stem;
}

RegistryUpdate Registry::add(BibstemEntry entry) const {
    if (!is_valid_bibstem(entry.stem)) throw Error(ErrorCode::InvalidStem, "invalid stem '" + entry.stem + "'");
    if (normalize_title(entry.full_title).empty()) throw Error(ErrorCode::InvalidRequest, "entry needs a title");
    for (const auto& field : {entry.stem, entry.full_title, entry.series})
        if (field.find_first_of("\t\r\n") != std::string::npos)
            throw Error(ErrorCode::InvalidRequest, "registry fields cannot contain tabs or newlines");
    if (find(entry.stem))
        throw Error(ErrorCode::DuplicateStem, "stem '" + entry.stem + "' is already registered", {{"stem", entry.stem}});

    Registry next = *this;
    auto link = [&](const std::optional<std::string>& other, auto member, const char* role) {
        if (!other) return;
        auto target = std::find_if(next.entries_.begin(), next.entries_.end(),
                                   [&](const auto& e) { return e.stem == *other; });
        if (target == next.entries_.end())
            throw Error(ErrorCode::BrokenContinuityLink, entry.stem + ": " + role + " '" + *other + "' is not registered",
                        {{"stem", entry.stem}});
        auto& back = (*target).*member;
        if (back && *back != entry.stem)
            throw Error(ErrorCode::BrokenContinuityLink,
                        entry.stem + ": '" + *other + "' is already linked to '" + *back + "'", {{"stem", entry.stem}});
        back = entry.stem;
    };
    link(entry.predecessor, &BibstemEntry::successor, "predecessor");
    link(entry.successor, &BibstemEntry::predecessor, "successor");

    next.lines_.emplace_back(next.entries_.size());
    next.entries_.push_back(entry);
    next.check_invariants();
    ++next.version_;

    std::string audit = "registry v" + std::to_string(next.version_) + ": added " + entry.stem + " (" +
                        describe(entry) + ")";
    if (entry.predecessor) audit += " after " + *entry.predecessor;
    if (entry.successor) audit += " before " + *entry.successor;
    return {std::move(next), std::move(audit)};
}

std::vector<std::string> Registry::continuity_chain(std::string_view stem) const {
    const BibstemEntry* cursor = &entries_[index_of(stem)];
    while (cursor->predecessor) cursor = find(*cursor->predecessor);
    std::vector<std::string> chain{cursor->stem};
    while (cursor->successor) {
        cursor = find(*cursor->successor);
        chain.push_back(cursor->stem);
    }
    return chain;
}

}  // namespace histscan
