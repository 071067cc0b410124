#include "histscan/volume_dir.hpp"

#include <fstream>
#include <sstream>

#include "histscan/error.hpp"

namespace histscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string(), {{"path", path.string()}});
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

VolumeDirectory read_volume_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
    VolumeDirectory out;

    json meta;
    try {
        meta = json::parse(slurp(dir / "volume.json"));
        out.request.volume_id = meta.value("volume_id", "");
        out.request.full_title = meta.at("full_title").get<std::string>();
        out.request.series = meta.value("series", "");
        const auto& volume = meta.at("volume");
        out.request.volume = volume.is_number_integer() ? std::to_string(volume.get<int>()) : volume.get<std::string>();
        out.request.publication_year = meta.at("publication_year").get<int>();
        out.request.publication_month = meta.value("publication_month", 0);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, "volume.json: " + std::string(e.what()));
    }

    out.pages = parse_pages_tsv(slurp(dir / "pages.tsv"));
    if (fs::exists(dir / "articles.tsv")) out.articles = parse_articles_tsv(slurp(dir / "articles.tsv"));

    if (fs::is_directory(dir / "scans")) {
        for (const auto& row : out.pages) {
            for (const char* ext : {".png", ".tif", ".tiff"}) {
                auto path = dir / "scans" / (row.scan_id + ext);
                if (fs::exists(path)) {
                    out.images[row.scan_id] = slurp(path);
                    break;
                }
            }
        }
    }
    for (const auto& a : out.articles)
        if (!a.abstract_ref.empty()) out.abstracts[a.article_id] = slurp(dir / a.abstract_ref);
    return out;
}

std::string import_volume(CaptureService& service, const VolumeDirectory& dir, bool enter_articles,
                          const std::string& operator_name) {
    auto volume = service.create_volume(dir.request, operator_name);
    const auto id = volume.id();

    std::vector<ImageUpload> uploads;
    for (const auto& row : dir.pages) {
        auto image = dir.images.find(row.scan_id);
        uploads.push_back({row.scan_id, image == dir.images.end() ? std::string() : image->second});
    }
    service.ingest_scans(id, uploads, std::nullopt, operator_name);

    for (const auto& row : dir.pages) {
        if (!row.label_text.empty()) service.assign_page(id, row.scan_id, row.label_text, std::nullopt, operator_name);
        if (!row.override_text.empty())
            service.set_override(id, row.scan_id, row.override_text, row.override_note, std::nullopt, operator_name);
        if (row.status == ScanStatus::MarkedDuplicate) service.mark_duplicate(id, row.scan_id, std::nullopt, operator_name);
    }

    if (!enter_articles || dir.articles.empty()) return id;

    service.transition_to_article_mode(id, service.volume(id).version(), operator_name);
    for (const auto& row : dir.articles) {
        ArticleFields fields;
        fields.article_id = row.article_id;
        fields.title = row.title;
        fields.authors = row.authors;
        fields.first_page = parse_page_label(row.first_page);
        fields.last_page = parse_page_label(row.last_page);
        if (auto it = dir.abstracts.find(row.article_id); it != dir.abstracts.end()) fields.abstract = it->second;
        service.create_article(id, fields, std::nullopt, operator_name);
    }
    return id;
}

std::string derive_volume(const Registry& registry, const fs::path& path, OutputFormat format) {
    auto dir = read_volume_dir(path);
    CaptureService service(registry);
    auto id = import_volume(service, dir, true);
    if (service.volume(id).state() != VolumeState::ArticleEntry)
        // No articles: still enforce the pagination gate before reporting.
        service.transition_to_article_mode(id, service.volume(id).version());
    service.finalize_volume(id, service.volume(id).version());
    return format == OutputFormat::Tsv ? articles_tsv(service.volume(id)) : service.export_file(id);
}

}  // namespace histscan
