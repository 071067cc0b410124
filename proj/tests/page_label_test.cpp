#include <array>
#include <string>

#include "doctest.h"
#include "histscan/error.hpp"
#include "histscan/page_label.hpp"

using namespace histscan;

namespace {

// Place-value construction, unrelated to the greedy encoder under test.
std::string roman_by_places(int n) {
    static const std::array<const char*, 10> ones{"", "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix"};
    static const std::array<const char*, 10> tens{"", "x", "xx", "xxx", "xl", "l", "lx", "lxx", "lxxx", "xc"};
    static const std::array<const char*, 5> hundreds{"", "c", "cc", "ccc", "cd"};
    return std::string(hundreds[n / 100]) + tens[(n / 10) % 10] + ones[n % 10];
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("roman numerals agree with a place-value table for 1..400") {
    for (int n = 1; n <= 400; ++n) {
        auto text = roman_by_places(n);
        CHECK(roman_to_int(text) == n);
        CHECK(int_to_roman(n) == text);
        auto label = parse_page_label(text);
        CHECK(label.kind == LabelKind::Roman);
        CHECK(label.primary == n);
    }
    CHECK(roman_by_places(14) == "xiv");
}

TEST_CASE("non-canonical roman numerals are rejected") {
    for (const char* bad : {"iiii", "vx", "ic", "IIx", "mmmm", "vv", "xxxx"}) CHECK_FALSE(roman_to_int(bad));
    CHECK(roman_to_int("XIV") == 14);
    CHECK(parse_page_label("XIV").upper_roman);
    CHECK(format_page_label(parse_page_label("XIV")) == "XIV");
}

TEST_CASE("label grammar") {
    CHECK(parse_page_label("305") == PageLabel::arabic(305));
    CHECK(parse_page_label("D4") == PageLabel::lettered('D', 4));
    CHECK(parse_page_label("D:305") == PageLabel::lettered('D', 305));
    CHECK(parse_page_label("1.1") == PageLabel::composite(1, 1));
    CHECK(parse_page_label("plate") == PageLabel::plate());
    CHECK(parse_page_label("Plate 3") == PageLabel::plate(3));
    CHECK(parse_page_label("unnumbered 2") == PageLabel::unnumbered(2));
    CHECK(parse_page_label("D").kind == LabelKind::Roman);  // 500

    for (const char* bad : {"", " 3", "3 ", "0", "007", "d4", "1.", ".1", "1.2.3", "D:", "D:x", "plates", "plate 0",
                            "abc", "4a"})
        CHECK_MESSAGE(code_of([&] { parse_page_label(bad); }) == ErrorCode::Unparseable, bad);
}

TEST_CASE("canonical text re-parses to the same label") {
    for (const char* text : {"1", "9999", "xlii", "MCM", "D:1", "A:17", "12.4", "plate 7", "unnumbered 1"}) {
        auto label = parse_page_label(text);
        CHECK(parse_page_label(format_page_label(label)) == label);
    }
    CHECK(format_page_label(parse_page_label("D4")) == "D:4");
}

TEST_CASE("identity ignores roman case") {
    CHECK(parse_page_label("iv").same_page(parse_page_label("IV")));
    CHECK_FALSE(parse_page_label("iv").same_page(parse_page_label("4")));
    CHECK_FALSE(parse_page_label("D:4").same_page(parse_page_label("E:4")));
}

TEST_CASE("successor labels") {
    CHECK(next_label(PageLabel::arabic(41)) == PageLabel::arabic(42));
    auto next = next_label(parse_page_label("D:17"));
    REQUIRE(next);
    CHECK(parse_page_label(format_page_label(*next)) == PageLabel::lettered('D', 18));
    CHECK(next_label(PageLabel::roman(9, true)) == PageLabel::roman(10, true));
    CHECK(next_label(PageLabel::composite(1, 8)) == PageLabel::composite(1, 9));
    CHECK_FALSE(next_label(PageLabel::plate(2)));
    CHECK_FALSE(next_label(PageLabel::roman(3999)));
}
