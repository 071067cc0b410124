#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "histscan/volume.hpp"

namespace histscan {

inline constexpr std::string_view kOrigin = "ADS";

/// One finalized article as handed to downstream search systems.
struct ExportRecord {
    std::string bibcode;
    std::string title;
    std::string authors;
    std::string journal_ref;
    std::string pub_date;
    std::string origin;

    bool operator==(const ExportRecord&) const = default;
};

/// Records in first-page order. Throws WrongState unless the volume is finalized.
std::vector<ExportRecord> build_export_records(const Volume& volume);

/// Title/Authors/Journal/Publication Date/Origin/Bibliographic Code blocks
/// separated by blank lines.
std::string format_export(const std::vector<ExportRecord>& records);

inline std::string export_records(const Volume& volume) { return format_export(build_export_records(volume)); }

// Snapshot files. All are deterministic functions of the volume state.
std::string pages_tsv(const Volume& volume);
std::string articles_tsv(const Volume& volume);
nlohmann::json volume_json(const Volume& volume);
/// Path of an article's abstract relative to the volume directory, or "".
std::string abstract_ref(const ArticleRecord& article);

inline constexpr std::string_view kPagesHeader =
    "scan_id\tsequence_index\tstatus\tlabel_kind\tlabel_text\toverride_text\toverride_note";
inline constexpr std::string_view kArticlesHeader =
    "article_id\tbibcode\ttitle\tauthors\tfirst_page\tlast_page\tabstract_ref";

struct PagesRow {
    std::string scan_id;
    int sequence_index = 0;
    ScanStatus status = ScanStatus::Active;
    std::string label_text;
    std::string override_text;
    std::string override_note;
};

struct ArticlesRow {
    std::string article_id;
    std::string bibcode;
    std::string title;
    std::vector<Author> authors;
    std::string first_page;
    std::string last_page;
    std::string abstract_ref;
};

/// Parsers for the snapshot tables (header row required). Rows come back
/// in file order for articles and sequence order for pages.
std::vector<PagesRow> parse_pages_tsv(std::string_view content);
std::vector<ArticlesRow> parse_articles_tsv(std::string_view content);

std::string join_authors(const std::vector<Author>& authors);
std::vector<Author> split_authors(std::string_view text);

// Event log. Each accepted mutation is one JSON event whose "seq" equals
// the volume version it produced; replaying a log rebuilds the volume.
void apply_event(std::optional<Volume>& volume, const nlohmann::json& event);
Volume replay_events(const std::vector<nlohmann::json>& events);

nlohmann::json to_json(const VolumeMetadata& metadata);
nlohmann::json to_json(const ScanImage& scan);
nlohmann::json to_json(const PageAssignment& assignment);
nlohmann::json to_json(const ArticleRecord& article);
nlohmann::json to_json(const PaginationReport& report);
nlohmann::json to_json(const ExportRecord& record);
nlohmann::json to_json(const Author& author);

}  // namespace histscan
