#include "histscan/page_label.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include "histscan/error.hpp"

namespace histscan {

namespace {

constexpr int kMaxPageNumber = 99'999'999;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// Positive decimal without leading zeros.
std::optional<int> parse_positive(std::string_view s) {
    if (!all_digits(s) || s.front() == '0' || s.size() > 8) return std::nullopt;
    int value = 0;
    std::from_chars(s.data(), s.data() + s.size(), value);
    return value;
}

[[noreturn]] void unparseable(std::string_view text, const char* why) {
    throw Error(ErrorCode::Unparseable, "page label '" + std::string(text) + "': " + why,
                {{"label", std::string(text)}});
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

std::optional<PageLabel> parse_keyword(std::string_view text) {
    for (auto [word, kind] : {std::pair{std::string_view("plate"), LabelKind::Plate},
                              std::pair{std::string_view("unnumbered"), LabelKind::Unnumbered}}) {
        if (text.size() < word.size() || !iequals(text.substr(0, word.size()), word)) continue;
        auto rest = text.substr(word.size());
        if (rest.empty()) return PageLabel{kind, 0, 0, 0, false};
        if (rest.front() != ' ') continue;
        auto ordinal = parse_positive(rest.substr(1));
        if (!ordinal) unparseable(text, "bad ordinal");
        return PageLabel{kind, 0, *ordinal, 0, false};
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(LabelKind kind) noexcept {
    switch (kind) {
        case LabelKind::Arabic: return "arabic";
        case LabelKind::Roman: return "roman";
        case LabelKind::LetterPrefixed: return "letter";
        case LabelKind::Composite: return "composite";
        case LabelKind::Plate: return "plate";
        case LabelKind::Unnumbered: return "unnumbered";
    }
    return "arabic";
}

LabelKind label_kind_from_string(std::string_view text) {
    for (auto kind : {LabelKind::Arabic, LabelKind::Roman, LabelKind::LetterPrefixed, LabelKind::Composite,
                      LabelKind::Plate, LabelKind::Unnumbered})
        if (to_string(kind) == text) return kind;
    throw Error(ErrorCode::Unparseable, "unknown label kind '" + std::string(text) + "'");
}

std::optional<int> roman_to_int(std::string_view text) {
    if (text.empty() || text.size() > 15) return std::nullopt;
    bool upper = std::isupper(static_cast<unsigned char>(text.front())) != 0;
    int total = 0;
    int previous = 0;
    for (auto it = text.rbegin(); it != text.rend(); ++it) {
        char c = *it;
        if ((std::isupper(static_cast<unsigned char>(c)) != 0) != upper) return std::nullopt;
        int value = 0;
        switch (std::tolower(static_cast<unsigned char>(c))) {
            case 'i': value = 1; break;
            case 'v': value = 5; break;
            case 'x': value = 10; break;
            case 'l': value = 50; break;
            case 'c': value = 100; break;
            case 'd': value = 500; break;
            case 'm': value = 1000; break;
            default: return std::nullopt;
        }
        total += value < previous ? -value : value;
        previous = std::max(previous, value);
    }
    // Only the canonical spelling is accepted ("iiii", "vx", "ic" are not).
    if (total < 1 || total > 3999 || int_to_roman(total, upper) != text) return std::nullopt;
    return total;
}

std::string int_to_roman(int value, bool upper) {
    static constexpr std::array<std::pair<int, std::string_view>, 13> table{{
        {1000, "m"}, {900, "cm"}, {500, "d"}, {400, "cd"}, {100, "c"}, {90, "xc"}, {50, "l"},
        {40, "xl"}, {10, "x"}, {9, "ix"}, {5, "v"}, {4, "iv"}, {1, "i"},
    }};
    std::string out;
    for (auto [n, glyphs] : table) {
        while (value >= n) {
            out += glyphs;
            value -= n;
        }
    }
    if (upper)
        for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

PageLabel parse_page_label(std::string_view text) {
    if (text.empty()) unparseable(text, "empty");
    if (std::isspace(static_cast<unsigned char>(text.front())) || std::isspace(static_cast<unsigned char>(text.back())))
        unparseable(text, "surrounding whitespace");

    if (auto keyword = parse_keyword(text)) return *keyword;

    if (all_digits(text)) {
        auto n = parse_positive(text);
        if (!n) unparseable(text, "page numbers start at 1 and carry no leading zeros");
        return PageLabel::arabic(*n);
    }

    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto a = parse_positive(text.substr(0, dot));
        auto b = parse_positive(text.substr(dot + 1));
        if (!a || !b) unparseable(text, "composite labels are <number>.<number>");
        return PageLabel::composite(*a, *b);
    }

    if (text.front() >= 'A' && text.front() <= 'Z' && text.size() > 1) {
        auto digits = text.substr(1);
        if (digits.front() == ':') digits.remove_prefix(1);
        if (all_digits(digits)) {
            auto n = parse_positive(digits);
            if (!n) unparseable(text, "bad page number after letter");
            return PageLabel::lettered(text.front(), *n);
        }
    }

    if (auto value = roman_to_int(text))
        return PageLabel::roman(*value, std::isupper(static_cast<unsigned char>(text.front())) != 0);

    unparseable(text, "no page grammar matches");
}

std::string format_page_label(const PageLabel& label) {
    switch (label.kind) {
        case LabelKind::Arabic: return std::to_string(label.primary);
        case LabelKind::Roman: return int_to_roman(label.primary, label.upper_roman);
        case LabelKind::LetterPrefixed: return std::string(1, label.letter) + ":" + std::to_string(label.primary);
        case LabelKind::Composite: return std::to_string(label.primary) + "." + std::to_string(label.secondary);
        case LabelKind::Plate:
            return label.primary == 0 ? std::string("plate") : "plate " + std::to_string(label.primary);
        case LabelKind::Unnumbered:
            return label.primary == 0 ? std::string("unnumbered") : "unnumbered " + std::to_string(label.primary);
    }
    return {};
}

std::optional<PageLabel> next_label(const PageLabel& label) {
    PageLabel next = label;
    switch (label.kind) {
        case LabelKind::Arabic:
        case LabelKind::LetterPrefixed:
            if (label.primary >= kMaxPageNumber) return std::nullopt;
            ++next.primary;
            return next;
        case LabelKind::Roman:
            if (label.primary >= 3999) return std::nullopt;
            ++next.primary;
            return next;
        case LabelKind::Composite:
            if (label.secondary >= kMaxPageNumber) return std::nullopt;
            ++next.secondary;
            return next;
        case LabelKind::Plate:
        case LabelKind::Unnumbered:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace histscan
