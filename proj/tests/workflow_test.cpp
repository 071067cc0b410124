#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "histscan/article.hpp"
#include "histscan/error.hpp"
#include "histscan/workflow.hpp"

using namespace histscan;
using nlohmann::json;

namespace {

const char* kYaleJournal =
    "Reports for the year presented by the Board of Managers of the Observatory of Yale University to the President "
    "and Fellows";
const char* kYaleTitle =
    "Reports for the Years 1900 to 1904, Presented by the Board of Managers of the Observatory of Yale University to "
    "the President and Fellows";

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::IoError;
}

// Builds an event log and keeps a live volume in step with it.
struct Log {
    std::vector<json> events;
    std::optional<Volume> volume;

    void push(json event) {
        apply_event(volume, event);
        event["seq"] = volume->version();
        events.push_back(std::move(event));
    }
};

Log yale_log() {
    Log log;
    log.push({{"type", "VolumeCreated"}, {"volume_id", "YalRY.1.1910"}, {"full_title", kYaleJournal}, {"series", ""},
              {"stem", "YalRY"}, {"volume", "1"}, {"publication_year", 1910}, {"publication_month", 0}});
    json scans = json::array();
    for (int i = 1; i <= 10; ++i) scans.push_back({{"scan_id", "s" + std::to_string(i)}, {"image_ref", ""}});
    log.push({{"type", "ScansIngested"}, {"scans", scans}});
    const char* labels[] = {"1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "1.7", "1.8", "2.1", "2.2"};
    for (int i = 0; i < 10; ++i)
        log.push({{"type", "PageAssigned"}, {"scan_id", "s" + std::to_string(i + 1)}, {"label", labels[i]}});
    log.push({{"type", "ArticleModeEntered"}});
    log.push({{"type", "ArticleCreated"}, {"article_id", "yale-a1"}, {"title", kYaleTitle},
              {"authors", json::array({{{"last_name", "Elkin"}, {"rest", "William L."}}})}, {"first_page", "1.1"},
              {"last_page", "1.8"}, {"abstract", nullptr}, {"bibcode", "1910YalRY...1....1E"}});
    return log;
}

void finalize(Log& log) {
    json codes = json::object();
    for (const auto& a : log.volume->articles()) codes[a.article_id] = format_bibcode(*a.bibcode);
    log.push({{"type", "VolumeFinalized"}, {"bibcodes", codes}});
}

std::string snapshot(const Volume& v) {
    return pages_tsv(v) + "\n" + articles_tsv(v) + "\n" + volume_json(v).dump(2);
}

}  // namespace

TEST_CASE("Yale export block matches the published record") {
    auto log = yale_log();
    CHECK(code_of([&] { export_records(*log.volume); }) == ErrorCode::WrongState);
    finalize(log);
    const std::string expected = std::string("Title: ") + kYaleTitle + "\n" +
                                 "Authors: Elkin, William L.\n" +
                                 "Journal: " + kYaleJournal + ", vol. 1, pp. 1.1-1.8\n" +
                                 "Publication Date: 00/1910\n"
                                 "Origin: ADS\n"
                                 "Bibliographic Code: 1910YalRY...1....1E\n";
    CHECK(export_records(*log.volume) == expected);
    CHECK(export_records(*log.volume) == export_records(*log.volume));

    auto records = build_export_records(*log.volume);
    REQUIRE(records.size() == 1);
    CHECK(records[0].pub_date == "00/1910");
    CHECK(records[0].origin == "ADS");
    CHECK(parse_bibcode(records[0].bibcode).year == 1910);
}

TEST_CASE("empty export fields keep their labels") {
    ExportRecord r{"1906PUSNO...4D...1.", "T", "", "J", "00/1906", "ADS"};
    CHECK(format_export({r, r}) ==
          "Title: T\nAuthors:\nJournal: J\nPublication Date: 00/1906\nOrigin: ADS\nBibliographic Code: "
          "1906PUSNO...4D...1.\n\nTitle: T\nAuthors:\nJournal: J\nPublication Date: 00/1906\nOrigin: ADS\n"
          "Bibliographic Code: 1906PUSNO...4D...1.\n");
    CHECK(format_export({}).empty());
}

TEST_CASE("finalize gates") {
    auto log = yale_log();
    auto& v = *log.volume;
    // Every article needs its final code.
    CHECK(code_of([&] { v.finalize({}); }) == ErrorCode::InvalidRequest);
    v.remove_article("yale-a1");
    CHECK(code_of([&] { v.finalize({}); }) == ErrorCode::NoArticles);

    auto again = yale_log();
    finalize(again);
    CHECK(again.volume->state() == VolumeState::Finalized);
    CHECK(code_of([&] { again.volume->remove_article("yale-a1"); }) == ErrorCode::WrongState);
    CHECK(code_of([&] { again.volume->reopen_pagination(); }) == ErrorCode::WrongState);
}

TEST_CASE("articles without a bibcode block finalize") {
    auto log = yale_log();
    log.push({{"type", "ArticleCreated"}, {"article_id", "yale-a2"}, {"title", "Second"},
              {"authors", json::array()}, {"first_page", "2.1"}, {"last_page", "2.2"}, {"bibcode", nullptr}});
    CHECK_FALSE(log.volume->article("yale-a2").bibcode);
    CHECK(code_of([&] { log.volume->finalize({{"yale-a1", parse_bibcode("1910YalRY...1....1E")}}); }) ==
          ErrorCode::UnderivedBibcodes);
}

TEST_CASE("replay reproduces snapshots byte for byte") {
    auto log = yale_log();
    finalize(log);
    auto replayed = replay_events(log.events);
    CHECK(replayed.version() == log.volume->version());
    CHECK(snapshot(replayed) == snapshot(*log.volume));
    CHECK(export_records(replayed) == export_records(*log.volume));

    // Through a JSON text round trip as well, since the log lives on disk.
    std::vector<json> reread;
    for (const auto& e : log.events) reread.push_back(json::parse(e.dump()));
    CHECK(snapshot(replay_events(reread)) == snapshot(*log.volume));

    auto broken = log.events;
    broken[3]["seq"] = 99;
    CHECK(code_of([&] { replay_events(broken); }) == ErrorCode::IoError);
}

TEST_CASE("pages and articles tables round trip") {
    Log log;
    log.push({{"type", "VolumeCreated"}, {"volume_id", "v"}, {"full_title", "Bulletin Astronomique"}, {"series", ""},
              {"stem", "BuAst"}, {"volume", "3"}, {"publication_year", 1886}, {"publication_month", 0}});
    json scans = json::array();
    for (const char* id : {"a", "b", "c", "d"}) scans.push_back({{"scan_id", id}, {"image_ref", ""}});
    log.push({{"type", "ScansIngested"}, {"scans", scans}});
    log.push({{"type", "PageAssigned"}, {"scan_id", "a"}, {"label", "17"}});
    log.push({{"type", "OverrideSet"}, {"scan_id", "a"}, {"label", "19"}, {"note", "erratum"}});
    log.push({{"type", "PageAssigned"}, {"scan_id", "b"}, {"label", "XX"}});
    log.push({{"type", "DuplicateMarked"}, {"scan_id", "c"}});
    log.push({{"type", "PageAssigned"}, {"scan_id", "d"}, {"label", "plate"}});

    auto pages = pages_tsv(*log.volume);
    CHECK(pages == std::string(kPagesHeader) +
                       "\n"
                       "a\t0\tActive\tarabic\t17\t19\terratum\n"
                       "b\t1\tActive\troman\tXX\t\t\n"
                       "c\t2\tMarkedDuplicate\t\t\t\t\n"
                       "d\t3\tActive\tplate\tplate 4\t\t\n");
    auto rows = parse_pages_tsv(pages);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].override_text == "19");
    CHECK(rows[0].override_note == "erratum");
    CHECK(rows[2].status == ScanStatus::MarkedDuplicate);

    CHECK(code_of([] { parse_pages_tsv("nope\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { parse_pages_tsv(std::string(kPagesHeader) + "\na\t0\tActive\troman\t17\t\t\n"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([&] {
              parse_pages_tsv(std::string(kPagesHeader) + "\na\t0\tActive\t\t\t\t\nb\t0\tActive\t\t\t\t\n");
          }) == ErrorCode::ParseError);

    log.push({{"type", "DuplicateUnmarked"}, {"scan_id", "c"}});
    log.push({{"type", "PageAssigned"}, {"scan_id", "c"}, {"label", "1"}});
    log.push({{"type", "ArticleModeEntered"}});
    log.push({{"type", "ArticleCreated"}, {"article_id", "x1"}, {"title", "Sur la Lune"},
              {"authors", json::array({{{"last_name", "Tisserand"}, {"rest", "F."}}, {{"last_name", "Loewy"}, {"rest", ""}}})},
              {"first_page", "19"}, {"last_page", "1"}, {"abstract", "Texte."}, {"bibcode", nullptr}});
    auto articles = articles_tsv(*log.volume);
    CHECK(articles == std::string(kArticlesHeader) + "\nx1\t\tSur la Lune\tTisserand, F.; Loewy\t19\t1\tabstracts/x1.txt\n");
    auto parsed = parse_articles_tsv(articles);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].authors == std::vector<Author>{{"Tisserand", "F."}, {"Loewy", ""}});
    CHECK(parsed[0].abstract_ref == "abstracts/x1.txt");
    CHECK(snapshot(replay_events(log.events)) == snapshot(*log.volume));
}

TEST_CASE("random histories replay to the same state") {
    std::mt19937 rng(5);
    for (int round = 0; round < 30; ++round) {
        Log log;
        log.push({{"type", "VolumeCreated"}, {"volume_id", "r"}, {"full_title", "T"}, {"series", ""}, {"stem", "BuAst"},
                  {"volume", "1"}, {"publication_year", 1900}, {"publication_month", 3}});
        json scans = json::array();
        for (int i = 0; i < 6; ++i) scans.push_back({{"scan_id", "s" + std::to_string(i)}, {"image_ref", ""}});
        log.push({{"type", "ScansIngested"}, {"scans", scans}});
        for (int step = 0; step < 60; ++step) {
            auto id = "s" + std::to_string(rng() % 6);
            auto label = std::to_string(1 + rng() % 8);
            json event;
            switch (rng() % 4) {
                case 0: event = {{"type", "PageAssigned"}, {"scan_id", id}, {"label", label}}; break;
                case 1: event = {{"type", "DuplicateMarked"}, {"scan_id", id}}; break;
                case 2: event = {{"type", "DuplicateUnmarked"}, {"scan_id", id}}; break;
                default: event = {{"type", "OverrideSet"}, {"scan_id", id}, {"label", label}, {"note", "n"}}; break;
            }
            try {
                log.push(event);
            } catch (const Error&) {
                // Rejected mutations never reach the log.
            }
        }
        auto replayed = replay_events(log.events);
        CHECK(snapshot(replayed) == snapshot(*log.volume));
        CHECK(replayed.version() == log.events.size());
    }
}
