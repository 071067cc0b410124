#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "histscan/cli.hpp"
#include "histscan/registry.hpp"
#include "histscan/volume_dir.hpp"

using namespace histscan;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures{HISTSCAN_FIXTURES};
const std::string kRegistry = (kFixtures / "registry.tsv").string();

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "histscan");
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("histscan-cli-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path / name, std::ios::binary) << content;
        return path / name;
    }
};

Registry fixture_registry() { return Registry::load(slurp(kRegistry)); }

}  // namespace

TEST_CASE("validate") {
    TempDir dir("validate");
    auto good = run({"validate", dir.write("good.txt", "1910YalRY...1....1E\n1906PUSNO...4D...1.\n").string()});
    CHECK(good.code == 0);
    CHECK(good.err.empty());

    auto short_line = run({"validate", dir.write("short.txt", "1910YalRY...1....1\n").string()});
    CHECK(short_line.code == 1);
    CHECK(short_line.err.rfind("line 1: WrongLength", 0) == 0);

    CHECK(run({"validate", dir.write("empty.txt", "").string()}).code == 0);

    auto mixed = run({"validate", dir.write("mixed.txt", "1910YalRY...1....1E\n191OYalRY...1....1E\n").string()});
    CHECK(mixed.code == 1);
    CHECK(mixed.err.rfind("line 2: InvalidYear at chars 0-3: ", 0) == 0);
    CHECK(std::count(mixed.err.begin(), mixed.err.end(), '\n') == 1);

    CHECK(run({"validate", (dir.path / "absent.txt").string()}).code == 2);
}

TEST_CASE("validation_report matches the codec") {
    std::size_t invalid = 0;
    auto report = validation_report("1910YalRY...1....1E\r\nshort\n", invalid);
    CHECK(invalid == 1);
    CHECK(report.rfind("line 2: WrongLength at chars 0-4: ", 0) == 0);
}

TEST_CASE("derive prints the library export") {
    auto yale = run({"--registry", kRegistry, "derive", (kFixtures / "volumes" / "yale").string()});
    REQUIRE(yale.code == 0);
    CHECK(yale.out == derive_volume(fixture_registry(), kFixtures / "volumes" / "yale", OutputFormat::ExportBlock));
    CHECK(yale.out.find("Publication Date: 00/1910\nOrigin: ADS\nBibliographic Code: 1910YalRY...1....1E\n") !=
          std::string::npos);

    auto pusno = run({"derive", (kFixtures / "volumes" / "pusno").string(), "--registry", kRegistry});
    REQUIRE(pusno.code == 0);
    CHECK(pusno.out.find("pp. D:1-D:305\n") != std::string::npos);
    CHECK(pusno.out.find("Bibliographic Code: 1906PUSNO...4D...1.\n") != std::string::npos);

    auto collision = run({"--registry", kRegistry, "derive", (kFixtures / "volumes" / "collision").string()});
    REQUIRE(collision.code == 0);
    CHECK(collision.out.find("Bibliographic Code: 1886BuAst...3Q...5S\n") != std::string::npos);
    CHECK(collision.out.find("Bibliographic Code: 1886BuAst...3....5S\n") != std::string::npos);

    auto tsv = run({"--registry", kRegistry, "--format", "tsv", "derive", (kFixtures / "volumes" / "collision").string()});
    REQUIRE(tsv.code == 0);
    CHECK(tsv.out == derive_volume(fixture_registry(), kFixtures / "volumes" / "collision", OutputFormat::Tsv));

    auto unpaginated = run({"--registry", kRegistry, "derive", (kFixtures / "volumes" / "unpaginated").string()});
    CHECK(unpaginated.code == 1);
    CHECK(unpaginated.out.empty());
    CHECK(unpaginated.err.find("PaginationIncomplete") != std::string::npos);

    CHECK(run({"--registry", kRegistry, "derive", "/no/such/dir"}).code == 2);
    CHECK(run({"--registry", "/no/such/registry.tsv", "derive", (kFixtures / "volumes" / "yale").string()}).code == 2);
}

TEST_CASE("registry subcommands") {
    auto list = run({"--registry", kRegistry, "registry", "list"});
    CHECK(list.code == 0);
    CHECK(list.out == slurp(kRegistry));

    auto resolved = run({"--registry", kRegistry, "registry", "resolve", "Bulletin Astronomique", "--series", "Serie I"});
    CHECK(resolved.code == 0);
    CHECK(resolved.out == resolve_stem(fixture_registry(), "Bulletin Astronomique", "Serie I") + "\n");
    CHECK(resolved.out == "BuAsI\n");

    auto unknown = run({"--registry", kRegistry, "registry", "resolve", "Annals of Nowhere"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("NotFound") != std::string::npos);

    TempDir dir("registry");
    auto copy = dir.write("registry.tsv", slurp(kRegistry));
    auto added = run({"--registry", copy.string(), "registry", "add", "--stem", "AnWiV", "--title",
                      "Annalen der Universitaets-Sternwarte Wien", "--series", "Vierte Folge", "--predecessor", "AnWiD"});
    REQUIRE(added.code == 0);
    BibstemEntry entry;
    entry.stem = "AnWiV";
    entry.full_title = "Annalen der Universitaets-Sternwarte Wien";
    entry.series = "Vierte Folge";
    entry.predecessor = "AnWiD";
    auto expected = register_stem(fixture_registry(), entry);
    CHECK(added.out == expected.audit_line + "\n");
    CHECK(slurp(copy) == expected.registry.serialize());
    CHECK(slurp(copy).rfind("# Journal-abbreviation registry fixture\n", 0) == 0);

    auto back = run({"--registry", copy.string(), "registry", "resolve", "Annalen der Universitaets-Sternwarte Wien",
                     "--series", "Vierte Folge"});
    CHECK(back.out == "AnWiV\n");

    auto duplicate = run({"--registry", copy.string(), "registry", "add", "--stem", "AnWiV", "--title", "X"});
    CHECK(duplicate.code == 1);
    CHECK(duplicate.err.find("DuplicateStem") != std::string::npos);
}

TEST_CASE("import and export through a data directory") {
    TempDir dir("data");
    auto imported = run({"--registry", kRegistry, "import", (kFixtures / "volumes" / "yale").string(), "--data",
                         dir.path.string(), "--operator", "ci"});
    REQUIRE(imported.code == 0);
    CHECK(imported.out == "YalRY.1.1910\n");
    CHECK(fs::exists(dir.path / "volumes" / "YalRY.1.1910" / "events.jsonl"));

    // Not finalized yet.
    CHECK(run({"--registry", kRegistry, "export", "YalRY.1.1910", "--data", dir.path.string()}).code == 1);
    CHECK(run({"--registry", kRegistry, "export", "nope", "--data", dir.path.string()}).code == 1);

    auto finalized = run({"--registry", kRegistry, "finalize", "YalRY.1.1910", "--data", dir.path.string()});
    REQUIRE(finalized.code == 0);
    auto exported = run({"--registry", kRegistry, "export", "YalRY.1.1910", "--data", dir.path.string()});
    REQUIRE(exported.code == 0);
    CHECK(exported.out == finalized.out);
    CHECK(exported.out == derive_volume(fixture_registry(), kFixtures / "volumes" / "yale", OutputFormat::ExportBlock));
    CHECK(slurp(dir.path / "volumes" / "YalRY.1.1910" / "export.txt") == exported.out);
    // Importing the same volume twice is refused.
    CHECK(run({"--registry", kRegistry, "import", (kFixtures / "volumes" / "yale").string(), "--data",
               dir.path.string()}).code == 1);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--format", "xml", "registry", "list"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}
