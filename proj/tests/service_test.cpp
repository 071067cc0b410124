#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "histscan/error.hpp"
#include "histscan/service.hpp"

using namespace histscan;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Registry fixture_registry() { return Registry::load(slurp(fs::path(HISTSCAN_FIXTURES) / "registry.tsv")); }

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::IoError;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("histscan-service-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const std::string kPng = std::string("\x89PNG\r\n\x1a\n", 8) + "fake-png-body";
const std::string kTiff = std::string("II*\0", 4) + "fake-tiff-body";

VolumeRequest bulletin(int volume, int year) {
    return {"", "Bulletin Astronomique", "", std::to_string(volume), year, 0};
}

// Creates a volume with `pages` scans labeled 1..pages and enters article mode.
std::string paged_volume(CaptureService& service, const VolumeRequest& request, int pages, const std::string& prefix) {
    auto id = service.create_volume(request).id();
    std::vector<ImageUpload> uploads;
    for (int i = 1; i <= pages; ++i) uploads.push_back({prefix + std::to_string(i), kPng});
    service.ingest_scans(id, uploads);
    for (int i = 1; i <= pages; ++i) service.assign_page(id, prefix + std::to_string(i), std::to_string(i));
    service.transition_to_article_mode(id, service.volume(id).version());
    return id;
}

ArticleFields article(const std::string& last_name, const char* first, const char* last) {
    ArticleFields f;
    f.title = "Article by " + last_name;
    f.authors = {{last_name, ""}};
    f.first_page = parse_page_label(first);
    f.last_page = parse_page_label(last);
    return f;
}

}  // namespace

TEST_CASE("create_volume") {
    CaptureService service(fixture_registry());
    auto v = service.create_volume({"", "Reports for the year presented by the Board of Managers of the Observatory "
                                        "of Yale University to the President and Fellows",
                                    "", "1", 1910, 0});
    CHECK(v.state() == VolumeState::PageNumbering);
    CHECK(v.version() == 1);
    CHECK(v.metadata().stem == "YalRY");
    CHECK(v.id() == "YalRY.1.1910");
    CHECK(code_of([&] { service.create_volume({"", "Unknown Annals", "", "1", 1910, 0}); }) ==
          ErrorCode::StemUnresolved);
    CHECK(code_of([&] { service.create_volume({"", "Bulletin Astronomique", "", "1", 999, 0}); }) ==
          ErrorCode::InvalidYear);
    CHECK(code_of([&] { service.create_volume({"YalRY.1.1910", "Bulletin Astronomique", "", "1", 1886, 0}); }) ==
          ErrorCode::DuplicateVolumeId);
    CHECK(code_of([&] { service.create_volume({"bad/id", "Bulletin Astronomique", "", "1", 1886, 0}); }) ==
          ErrorCode::InvalidRequest);
    CHECK(service.create_volume({"", "Bulletin Astronomique", "Serie I", "2", 1890, 0}).metadata().stem == "BuAsI");
}

TEST_CASE("ingest_scans") {
    CaptureService service(fixture_registry());
    auto id = service.create_volume(bulletin(3, 1886)).id();
    std::vector<ImageUpload> uploads;
    for (int i = 0; i < 10; ++i) uploads.push_back({"scan" + std::to_string(i), i % 2 ? kTiff : kPng});
    auto v = service.ingest_scans(id, uploads);
    REQUIRE(v.scans().size() == 10);
    for (int i = 0; i < 10; ++i) {
        CHECK(v.scans()[i].sequence_index == i);
        CHECK(v.scans()[i].status == ScanStatus::Active);
    }
    CHECK(service.scan_image("scan0")->content_type == "image/png");
    CHECK(service.scan_image("scan1")->content_type == "image/tiff");
    CHECK(service.scan_image("scan1")->bytes == kTiff);
    CHECK(v.scans()[0].image_ref == sha256_hex(kPng));

    CHECK(code_of([&] { service.ingest_scans(id, {{"scan3", kPng}}); }) == ErrorCode::DuplicateScanId);
    auto other = service.create_volume(bulletin(4, 1887)).id();
    CHECK(code_of([&] { service.ingest_scans(other, {{"scan3", kPng}}); }) == ErrorCode::DuplicateScanId);
    CHECK(code_of([&] { service.ingest_scans(other, {{"x", "GIF89a"}}); }) == ErrorCode::InvalidRequest);

    auto before = service.volume(id).version();
    CHECK(service.ingest_scans(id, {}).version() == before + 1);
}

TEST_CASE("sha256 matches known digests") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("optimistic versions") {
    CaptureService service(fixture_registry());
    auto id = service.create_volume(bulletin(3, 1886)).id();
    service.ingest_scans(id, {{"a", kPng}, {"b", kPng}});
    auto version = service.volume(id).version();
    service.assign_page(id, "a", "1", version);
    CHECK(service.volume(id).version() == version + 1);
    CHECK(code_of([&] { service.assign_page(id, "b", "2", version); }) == ErrorCode::VersionConflict);
    CHECK(service.volume(id).version() == version + 1);
    CHECK(code_of([&] { service.transition_to_article_mode(id, version); }) == ErrorCode::VersionConflict);
    try {
        service.transition_to_article_mode(id, version + 1);
        FAIL("expected PaginationIncomplete");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PaginationIncomplete);
        CHECK(e.details().at("report").at("unlabeled") == nlohmann::json::array({"b"}));
    }
    CHECK(code_of([&] { service.assign_page("nope", "a", "1"); }) == ErrorCode::UnknownVolume);
    CHECK(code_of([&] { service.assign_page(id, "a", "x y"); }) == ErrorCode::Unparseable);
    CHECK(code_of([&] {
              service.create_article(id, article("Faye", "1", "1"));
          }) == ErrorCode::WrongState);
}

TEST_CASE("concurrent mutations with one expected version: exactly one wins") {
    CaptureService service(fixture_registry());
    auto id = service.create_volume(bulletin(3, 1886)).id();
    std::vector<ImageUpload> uploads;
    for (int i = 0; i < 16; ++i) uploads.push_back({"c" + std::to_string(i), kPng});
    service.ingest_scans(id, uploads);
    for (int round = 0; round < 20; ++round) {
        auto version = service.volume(id).version();
        std::atomic<int> wins{0}, conflicts{0};
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&, t] {
                try {
                    service.assign_page(id, "c" + std::to_string(t), std::to_string(100 * round + t + 1), version);
                    ++wins;
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::VersionConflict) ++conflicts;
                }
            });
        }
        for (auto& th : threads) th.join();
        CHECK(wins == 1);
        CHECK(conflicts == 7);
        CHECK(service.volume(id).version() == version + 1);
    }
}

TEST_CASE("collision volume: one article gets Q") {
    CaptureService service(fixture_registry());
    auto id = paged_volume(service, bulletin(3, 1886), 8, "col");
    CHECK(service.create_article(id, article("Tisserand", "1", "4")).article.bibcode);
    auto second = service.create_article(id, article("Stephan", "5", "5"));
    auto third = service.create_article(id, article("St\xC3\xA9phan", "5", "7"));
    CHECK(format_bibcode(*second.article.bibcode) == "1886BuAst...3....5S");
    CHECK(format_bibcode(*third.article.bibcode) == "1886BuAst...3Q...5S");

    auto outcome = service.finalize_volume(id, service.volume(id).version());
    REQUIRE(outcome.records.size() == 3);
    int q_codes = 0;
    std::set<std::string> distinct;
    for (const auto& r : outcome.records) {
        q_codes += parse_bibcode(r.bibcode).qualifier.kind() == Qualifier::Kind::Dedup;
        distinct.insert(r.bibcode);
    }
    CHECK(q_codes == 1);
    CHECK(distinct.size() == 3);
    CHECK(service.finalized_codes("BuAst").size() == 3);
    CHECK(code_of([&] { service.finalize_volume(id, service.volume(id).version()); }) == ErrorCode::WrongState);
}

TEST_CASE("finalize deduplicates across volumes of one stem") {
    CaptureService service(fixture_registry());
    auto first = paged_volume(service, {"first", "Bulletin Astronomique", "", "3", 1886, 0}, 2, "f");
    auto second = paged_volume(service, {"second", "Bulletin Astronomique", "", "3", 1886, 0}, 2, "g");
    service.create_article(first, article("Faye", "1", "2"));
    // Derived before the first volume is finalized, so it starts out identical.
    auto pending = service.create_article(second, article("Folie", "1", "1"));
    CHECK(format_bibcode(*pending.article.bibcode) == "1886BuAst...3....1F");
    service.create_article(second, article("Fizeau", "2", "2"));
    service.finalize_volume(first, service.volume(first).version());
    auto outcome = service.finalize_volume(second, service.volume(second).version());
    CHECK(outcome.records[0].bibcode == "1886BuAst...3Q...1F");
    CHECK(outcome.records[1].bibcode == "1886BuAst...3....2F");

    // Articles created after finalization see the global set immediately.
    auto third = paged_volume(service, {"third", "Bulletin Astronomique", "", "3", 1886, 0}, 1, "h");
    auto late = service.create_article(third, article("Flammarion", "1", "1"));
    CHECK(format_bibcode(*late.article.bibcode) == "1886BuAst...3R...1F");
}

TEST_CASE("underivable first pages are stored with an error and block finalize") {
    CaptureService service(fixture_registry());
    auto id = service.create_volume(bulletin(5, 1888)).id();
    service.ingest_scans(id, {{"r1", kPng}, {"r2", kPng}});
    service.assign_page(id, "r1", "i");
    service.assign_page(id, "r2", "1");
    service.transition_to_article_mode(id, service.volume(id).version());
    auto outcome = service.create_article(id, article("Faye", "i", "1"));
    REQUIRE(outcome.bibcode_error);
    CHECK((*outcome.bibcode_error).at("code") == "UnsupportedForBibcode");
    CHECK(code_of([&] { service.finalize_volume(id, service.volume(id).version()); }) ==
          ErrorCode::UnderivedBibcodes);
    service.remove_article(id, outcome.article.article_id);
    service.create_article(id, article("Faye", "1", "1"));
    CHECK(service.finalize_volume(id, service.volume(id).version()).records.size() == 1);
}

TEST_CASE("a data directory survives a restart") {
    TempDir dir;
    std::string id;
    std::string pages, articles, exported;
    std::uint64_t version = 0;
    {
        CaptureService service(fixture_registry(), dir.path);
        id = paged_volume(service, bulletin(3, 1886), 3, "p");
        auto a = article("Faye", "1", "3");
        a.abstract = "Une note.";
        service.create_article(id, a);
        service.finalize_volume(id, service.volume(id).version());
        exported = service.export_file(id);
        version = service.volume(id).version();
        pages = slurp(dir.path / "volumes" / id / "pages.tsv");
        articles = slurp(dir.path / "volumes" / id / "articles.tsv");
        CHECK(fs::exists(dir.path / "volumes" / id / "export.txt"));
        CHECK(slurp(dir.path / "volumes" / id / "abstracts" / (id + "-a1.txt")) == "Une note.");
        CHECK(fs::exists(dir.path / "blobs" / sha256_hex(kPng)));
    }
    // A torn append from a crash is ignored on reload.
    {
        std::ofstream log(dir.path / "volumes" / id / "events.jsonl", std::ios::app | std::ios::binary);
        log << "{\"type\":\"PageAss";
    }
    CaptureService reloaded(fixture_registry(), dir.path);
    CHECK(reloaded.volume(id).version() == version);
    CHECK(reloaded.volume(id).state() == VolumeState::Finalized);
    CHECK(reloaded.export_file(id) == exported);
    CHECK(reloaded.scan_image("p1")->bytes == kPng);
    CHECK(reloaded.finalized_codes("BuAst").contains("1886BuAst...3....1F"));
    CHECK(reloaded.event_log(id).size() == version);
    CHECK(slurp(dir.path / "volumes" / id / "pages.tsv") == pages);
    CHECK(slurp(dir.path / "volumes" / id / "articles.tsv") == articles);
}
