#include "histscan/bibcode.hpp"

#include <cctype>
#include <charconv>

namespace histscan {

namespace {

constexpr char kPad = '.';

// Field layout of yyyyjjjjjvvvvmppppa.
constexpr std::size_t kYearAt = 0, kYearLen = 4;
constexpr std::size_t kStemAt = 4, kStemLen = 5;
constexpr std::size_t kVolumeAt = 9, kVolumeLen = 4;
constexpr std::size_t kQualifierAt = 13;
constexpr std::size_t kPageAt = 14, kPageLen = 4;
constexpr std::size_t kAuthorAt = 18;

bool is_stem_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '&' || c == '+' || c == '-';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// "..12" style: pad dots then digits, no leading zero, at least one digit.
std::optional<int> parse_right_aligned(std::string_view field) {
    auto first = field.find_first_not_of(kPad);
    if (first == std::string_view::npos) return std::nullopt;
    auto digits = field.substr(first);
    if (digits.front() == '0') return std::nullopt;
    for (char c : digits)
        if (!is_digit(c)) return std::nullopt;
    int value = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), value);
    return value;
}

std::string right_aligned(int value, std::size_t width) {
    auto digits = std::to_string(value);
    return std::string(width - digits.size(), kPad) + digits;
}

bool is_type_code(std::string_view s) {
    if (s.size() != kVolumeLen) return false;
    for (char c : s)
        if (c < 'a' || c > 'z') return false;
    return true;
}

std::optional<Diagnostic> check_year(std::string_view code) {
    auto field = code.substr(kYearAt, kYearLen);
    bool digits = true;
    for (char c : field) digits = digits && is_digit(c);
    if (!digits || field.front() == '0')
        return Diagnostic{ErrorCode::InvalidYear, kYearAt, kYearAt + kYearLen - 1,
                          "year must be four digits in 1000-9999, got '" + std::string(field) + "'"};
    return std::nullopt;
}

std::optional<Diagnostic> check_stem(std::string_view code) {
    auto field = code.substr(kStemAt, kStemLen);
    auto end = field.find_last_not_of(kPad);
    auto stem = end == std::string_view::npos ? std::string_view{} : field.substr(0, end + 1);
    if (!is_valid_bibstem(stem))
        return Diagnostic{ErrorCode::InvalidStem, kStemAt, kStemAt + kStemLen - 1,
                          "journal stem must be 1-5 of A-Z a-z & + - left-aligned, got '" + std::string(field) + "'"};
    return std::nullopt;
}

std::optional<Diagnostic> check_volume(std::string_view code) {
    auto field = code.substr(kVolumeAt, kVolumeLen);
    if (is_type_code(field) || parse_right_aligned(field)) return std::nullopt;
    return Diagnostic{ErrorCode::InvalidVolume, kVolumeAt, kVolumeAt + kVolumeLen - 1,
                      "volume must be right-aligned digits or a 4-letter lowercase type code, got '" +
                          std::string(field) + "'"};
}

std::optional<Diagnostic> check_qualifier(std::string_view code) {
    char c = code[kQualifierAt];
    if (c == kPad || (c >= 'A' && c <= 'Z')) return std::nullopt;
    return Diagnostic{ErrorCode::InvalidQualifier, kQualifierAt, kQualifierAt,
                      std::string("qualifier must be '.' or A-Z, got '") + c + "'"};
}

std::optional<Diagnostic> check_page(std::string_view code) {
    if (parse_right_aligned(code.substr(kPageAt, kPageLen))) return std::nullopt;
    return Diagnostic{ErrorCode::InvalidPage, kPageAt, kPageAt + kPageLen - 1,
                      "page must be right-aligned digits 1-9999, got '" + std::string(code.substr(kPageAt, kPageLen)) +
                          "'"};
}

std::optional<Diagnostic> check_author(std::string_view code) {
    char c = code[kAuthorAt];
    if (c == kPad || (c >= 'A' && c <= 'Z')) return std::nullopt;
    return Diagnostic{ErrorCode::InvalidAuthorChar, kAuthorAt, kAuthorAt,
                      std::string("author initial must be '.' or A-Z, got '") + c + "'"};
}

// Latin-1 Supplement U+00C0..U+00FF, '*' marks non-letters.
constexpr std::string_view kFoldLatin1 =
    "AAAAAAACEEEEIIIIDNOOOOO*OUUUUYTs"
    "aaaaaaaceeeeiiiidnooooo*ouuuuyty";

// Latin Extended-A U+0100..U+017F.
constexpr std::string_view kFoldLatinExtA =
    "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIiIiJjKkkLlLlLlLlLlNnNnNnnNnOoOoOoOoRrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYyYZzZzZzs";

static_assert(kFoldLatin1.size() == 64);
static_assert(kFoldLatinExtA.size() == 128);

// Decodes the first UTF-8 code point; nullopt on malformed input.
std::optional<char32_t> first_code_point(std::string_view s) {
    if (s.empty()) return std::nullopt;
    auto b0 = static_cast<unsigned char>(s[0]);
    if (b0 < 0x80) return b0;
    std::size_t len = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : (b0 & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || s.size() < len) return std::nullopt;
    char32_t cp = b0 & (0x7F >> len);
    for (std::size_t i = 1; i < len; ++i) {
        auto b = static_cast<unsigned char>(s[i]);
        if ((b & 0xC0) != 0x80) return std::nullopt;
        cp = (cp << 6) | (b & 0x3F);
    }
    return cp;
}

}  // namespace

Qualifier Qualifier::page_designator(char c) {
    if (c < 'A' || c > 'P' || c == 'L')
        throw Error(ErrorCode::InvalidQualifier, std::string("page designator must be A-P other than L, got '") + c + "'");
    return Qualifier(Kind::PageDesignator, c);
}

Qualifier Qualifier::dedup(char c) {
    if (c < 'Q' || c > 'Z')
        throw Error(ErrorCode::InvalidQualifier, std::string("dedup qualifier must be Q-Z, got '") + c + "'");
    return Qualifier(Kind::Dedup, c);
}

Qualifier Qualifier::from_char(char c) {
    if (c == kPad) return none();
    if (c == 'L') return letter();
    if (c >= 'A' && c <= 'P') return page_designator(c);
    if (c >= 'Q' && c <= 'Z') return dedup(c);
    throw Error(ErrorCode::InvalidQualifier, std::string("qualifier must be '.' or A-Z, got '") + c + "'");
}

VolumeField VolumeField::from_text(std::string_view text) {
    if (is_type_code(text)) return type_code(std::string(text));
    if (!text.empty() && text.size() <= kVolumeLen && text.find(kPad) == std::string_view::npos)
        if (auto n = parse_right_aligned(text)) return number(*n);
    throw Error(ErrorCode::InvalidVolume, "volume must be 1-9999 or a 4-letter lowercase type code, got '" +
                                              std::string(text) + "'");
}

std::string VolumeField::text() const { return is_number() ? std::to_string(number()) : type_code(); }

bool is_valid_bibstem(std::string_view stem) {
    if (stem.empty() || stem.size() > kStemLen) return false;
    for (char c : stem)
        if (!is_stem_char(c)) return false;
    return true;
}

std::string format_bibcode(const Bibcode& b) {
    if (b.year < 1000 || b.year > 9999)
        throw Error(ErrorCode::InvalidYear, "year " + std::to_string(b.year) + " outside 1000-9999");
    if (!is_valid_bibstem(b.bibstem)) throw Error(ErrorCode::InvalidStem, "bad journal stem '" + b.bibstem + "'");
    if (b.volume.is_number() ? (b.volume.number() < 1 || b.volume.number() > 9999) : !is_type_code(b.volume.type_code()))
        throw Error(ErrorCode::InvalidVolume, "volume '" + b.volume.text() + "' outside 1-9999 / type code");
    if (b.page < 1 || b.page > 9999)
        throw Error(ErrorCode::InvalidPage, "page " + std::to_string(b.page) + " outside 1-9999");
    if (b.author_initial && (*b.author_initial < 'A' || *b.author_initial > 'Z'))
        throw Error(ErrorCode::InvalidAuthorChar, std::string("author initial '") + *b.author_initial + "'");

    std::string out;
    out.reserve(kBibcodeLength);
    out += std::to_string(b.year);
    out += b.bibstem;
    out.append(kStemLen - b.bibstem.size(), kPad);
    out += b.volume.is_number() ? right_aligned(b.volume.number(), kVolumeLen) : b.volume.type_code();
    out += b.qualifier.code();
    out += right_aligned(b.page, kPageLen);
    out += b.author_initial.value_or(kPad);
    return out;
}

std::vector<Diagnostic> validate_bibcode_string(std::string_view text) {
    if (text.size() != kBibcodeLength)
        return {Diagnostic{ErrorCode::WrongLength, 0, text.empty() ? 0 : text.size() - 1,
                           "bibcode must be 19 characters, got " + std::to_string(text.size())}};
    std::vector<Diagnostic> out;
    for (auto check : {check_year, check_stem, check_volume, check_qualifier, check_page, check_author})
        if (auto d = check(text)) out.push_back(std::move(*d));
    return out;
}

Bibcode parse_bibcode(std::string_view text) {
    if (auto diagnostics = validate_bibcode_string(text); !diagnostics.empty()) {
        const auto& d = diagnostics.front();
        throw Error(d.code, d.message, {{"first", d.first}, {"last", d.last}});
    }
    Bibcode b;
    std::from_chars(text.data(), text.data() + kYearLen, b.year);
    auto stem = text.substr(kStemAt, kStemLen);
    b.bibstem = std::string(stem.substr(0, stem.find_last_not_of(kPad) + 1));
    auto volume = text.substr(kVolumeAt, kVolumeLen);
    b.volume = is_type_code(volume) ? VolumeField::type_code(std::string(volume))
                                    : VolumeField::number(*parse_right_aligned(volume));
    b.qualifier = Qualifier::from_char(text[kQualifierAt]);
    b.page = *parse_right_aligned(text.substr(kPageAt, kPageLen));
    if (text[kAuthorAt] != kPad) b.author_initial = text[kAuthorAt];
    return b;
}

Bibcode assign_dedup_qualifier(const CodeSet& existing, const Bibcode& candidate) {
    if (!existing.contains(format_bibcode(candidate))) return candidate;
    auto kind = candidate.qualifier.kind();
    if (kind == Qualifier::Kind::Letter || kind == Qualifier::Kind::PageDesignator)
        throw Error(ErrorCode::QualifierOccupied,
                    "code " + format_bibcode(candidate) + " collides and its qualifier is already in use",
                    {{"bibcode", format_bibcode(candidate)}});
    Bibcode next = candidate;
    for (char c = 'Q'; c <= 'Z'; ++c) {
        next.qualifier = Qualifier::dedup(c);
        if (!existing.contains(format_bibcode(next))) return next;
    }
    next.qualifier = Qualifier::none();
    throw Error(ErrorCode::DedupExhausted, "all of Q-Z already used for " + format_bibcode(next),
                {{"bibcode", format_bibcode(next)}});
}

std::optional<char> author_initial(std::string_view last_name) {
    auto cp = first_code_point(last_name);
    if (!cp) return std::nullopt;
    char folded = '*';
    if (*cp < 0x80)
        folded = static_cast<char>(*cp);
    else if (*cp >= 0xC0 && *cp <= 0xFF)
        folded = kFoldLatin1[*cp - 0xC0];
    else if (*cp >= 0x100 && *cp <= 0x17F)
        folded = kFoldLatinExtA[*cp - 0x100];
    if (!std::isalpha(static_cast<unsigned char>(folded))) return std::nullopt;
    return static_cast<char>(std::toupper(static_cast<unsigned char>(folded)));
}

NormalizedPage to_bibcode_page(const PageLabel& label) {
    NormalizedPage out;
    switch (label.kind) {
        case LabelKind::Arabic:
            out.page = label.primary;
            break;
        case LabelKind::LetterPrefixed:
            if (label.letter < 'A' || label.letter > 'P' || label.letter == 'L')
                throw Error(ErrorCode::UnsupportedForBibcode,
                            std::string("letter '") + label.letter + "' cannot act as a page designator",
                            {{"label", format_page_label(label)}});
            out.qualifier = Qualifier::page_designator(label.letter);
            out.page = label.primary;
            break;
        case LabelKind::Composite:
            out.page = label.primary;
            out.sublabel = label.secondary;
            break;
        case LabelKind::Roman:
        case LabelKind::Plate:
        case LabelKind::Unnumbered:
            throw Error(ErrorCode::UnsupportedForBibcode,
                        "label '" + format_page_label(label) + "' has no bibcode page; override it first",
                        {{"label", format_page_label(label)}, {"kind", std::string(to_string(label.kind))}});
    }
    if (out.page > 9999)
        throw Error(ErrorCode::InvalidPage, "page " + std::to_string(out.page) + " exceeds 9999",
                    {{"label", format_page_label(label)}});
    return out;
}

NormalizedPage normalize_page_label(std::string_view raw) { return to_bibcode_page(parse_page_label(raw)); }

}  // namespace histscan
