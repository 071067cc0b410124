#include "histscan/service.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "histscan/article.hpp"
#include "histscan/error.hpp"
#include "histscan/tsv.hpp"

namespace histscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_version(const Volume& volume, std::optional<std::uint64_t> expected) {
    if (expected && *expected != volume.version())
        throw Error(ErrorCode::VersionConflict,
                    "volume " + volume.id() + " is at version " + std::to_string(volume.version()) + ", expected " +
                        std::to_string(*expected),
                    {{"current_version", volume.version()}, {"expected_version", *expected}});
}

bool valid_volume_id(std::string_view id) {
    if (id.empty() || id.size() > 100 || id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-' || c == '&' || c == '+';
    });
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message());
}

json article_event(const ArticleRecord& article) {
    json authors = json::array();
    for (const auto& a : article.authors) authors.push_back(to_json(a));
    return {{"type", "ArticleCreated"},
            {"article_id", article.article_id},
            {"title", article.title},
            {"authors", authors},
            {"first_page", format_page_label(article.first_page)},
            {"last_page", format_page_label(article.last_page)},
            {"abstract", article.abstract ? json(*article.abstract) : json(nullptr)},
            {"bibcode", article.bibcode ? json(format_bibcode(*article.bibcode)) : json(nullptr)}};
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

std::string image_content_type(std::string_view bytes) {
    if (bytes.starts_with("\x89PNG\r\n\x1a\n")) return "image/png";
    if (bytes.starts_with(std::string_view("II*\0", 4)) || bytes.starts_with(std::string_view("MM\0*", 4)))
        return "image/tiff";
    return {};
}

CaptureService::CaptureService(Registry registry, std::optional<fs::path> data_dir)
    : registry_(std::move(registry)), data_dir_(std::move(data_dir)) {
    if (data_dir_) {
        std::error_code ec;
        fs::create_directories(*data_dir_ / "volumes", ec);
        fs::create_directories(*data_dir_ / "blobs", ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot prepare data directory " + data_dir_->string());
        load_from_disk();
    }
}

CaptureService::~CaptureService() = default;

CaptureService::Slot& CaptureService::slot(const std::string& volume_id) const {
    std::shared_lock lock(volumes_mutex_);
    auto it = volumes_.find(volume_id);
    if (it == volumes_.end())
        throw Error(ErrorCode::UnknownVolume, "no volume '" + volume_id + "'", {{"volume_id", volume_id}});
    return *it->second;
}

void CaptureService::persist(const Volume& volume, const json& event) const {
    if (!data_dir_) return;
    auto dir = *data_dir_ / "volumes" / volume.id();
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream log(dir / "events.jsonl", std::ios::binary | std::ios::app);
    log << event.dump() << '\n';
    if (!log.flush()) throw Error(ErrorCode::IoError, "cannot append to event log of " + volume.id());
}

void CaptureService::write_snapshots(const Volume& volume) const {
    if (!data_dir_) return;
    auto dir = *data_dir_ / "volumes" / volume.id();
    write_file_atomic(dir / "volume.json", volume_json(volume).dump(2) + "\n");
    write_file_atomic(dir / "pages.tsv", pages_tsv(volume));
    write_file_atomic(dir / "articles.tsv", articles_tsv(volume));
    bool any_abstract = false;
    for (const auto& a : volume.articles()) any_abstract = any_abstract || a.abstract.has_value();
    if (any_abstract) {
        fs::create_directories(dir / "abstracts");
        for (const auto& a : volume.articles())
            if (a.abstract) write_file_atomic(dir / abstract_ref(a), *a.abstract);
    }
    if (volume.state() == VolumeState::Finalized) write_file_atomic(dir / "export.txt", export_records(volume));
}

const Volume& CaptureService::commit(Slot& s, std::optional<std::uint64_t> expected_version, json event,
                                     const std::string& operator_name) {
    check_version(s.volume, expected_version);
    std::optional<Volume> next = s.volume;
    apply_event(next, event);
    event["seq"] = next->version();
    event["operator"] = operator_name;
    persist(*next, event);
    s.log.push_back(std::move(event));
    s.volume = std::move(*next);
    write_snapshots(s.volume);
    return s.volume;
}

void CaptureService::load_from_disk() {
    for (const auto& entry : fs::directory_iterator(*data_dir_ / "volumes")) {
        auto log_path = entry.path() / "events.jsonl";
        if (!entry.is_directory() || !fs::exists(log_path)) continue;
        auto content = read_file(log_path);
        // A final line without its newline is a torn append; it never committed.
        if (!content.empty() && content.back() != '\n') content.erase(content.rfind('\n') + 1);
        std::vector<json> events;
        for (auto line : split_lines(content))
            if (!line.empty()) events.push_back(json::parse(line));
        if (events.empty()) continue;
        auto volume = replay_events(events);
        {
            std::lock_guard lock(scans_mutex_);
            for (const auto& s : volume.scans()) scan_owner_[s.scan_id] = volume.id();
        }
        if (volume.state() == VolumeState::Finalized) {
            std::lock_guard lock(codes_mutex_);
            for (const auto& a : volume.articles())
                finalized_codes_[volume.metadata().stem].insert(format_bibcode(*a.bibcode));
        }
        auto s = std::make_unique<Slot>(std::move(volume));
        s->log = std::move(events);
        auto id = s->volume.id();
        volumes_.emplace(std::move(id), std::move(s));
    }
}

std::string CaptureService::store_blob(const std::string& bytes) const {
    auto ref = sha256_hex(bytes);
    if (data_dir_) {
        auto path = *data_dir_ / "blobs" / ref;
        if (!fs::exists(path)) write_file_atomic(path, bytes);
    } else {
        std::lock_guard lock(blobs_mutex_);
        memory_blobs_.emplace(ref, bytes);
    }
    return ref;
}

Volume CaptureService::create_volume(const VolumeRequest& request, const std::string& operator_name) {
    if (request.publication_year < 1000 || request.publication_year > 9999)
        throw Error(ErrorCode::InvalidYear,
                    "publication year " + std::to_string(request.publication_year) + " outside 1000-9999");
    auto volume_field = VolumeField::from_text(request.volume);
    std::string stem;
    try {
        stem = registry_.resolve(request.full_title,
                                 request.series.empty() ? std::nullopt : std::optional<std::string_view>(request.series),
                                 request.publication_year,
                                 volume_field.is_number() ? std::optional<int>(volume_field.number()) : std::nullopt);
    } catch (const Error& e) {
        throw Error(ErrorCode::StemUnresolved, "no journal stem for '" + request.full_title + "': " + e.what(),
                    {{"cause", std::string(to_string(e.code()))}, {"details", e.details()}});
    }

    auto id = request.volume_id.empty()
                  ? stem + "." + volume_field.text() + "." + std::to_string(request.publication_year)
                  : request.volume_id;
    if (!valid_volume_id(id))
        throw Error(ErrorCode::InvalidRequest, "volume id '" + id + "' must be 1-100 of [A-Za-z0-9._&+-]");

    json event = {{"type", "VolumeCreated"},
                  {"volume_id", id},
                  {"full_title", request.full_title},
                  {"series", request.series},
                  {"stem", stem},
                  {"volume", volume_field.text()},
                  {"publication_year", request.publication_year},
                  {"publication_month", request.publication_month}};

    std::unique_lock lock(volumes_mutex_);
    if (volumes_.contains(id))
        throw Error(ErrorCode::DuplicateVolumeId, "volume '" + id + "' already exists", {{"volume_id", id}});
    std::optional<Volume> created;
    apply_event(created, event);
    event["seq"] = created->version();
    event["operator"] = operator_name;
    persist(*created, event);
    auto s = std::make_unique<Slot>(std::move(*created));
    s->log.push_back(std::move(event));
    write_snapshots(s->volume);
    Volume copy = s->volume;
    volumes_.emplace(id, std::move(s));
    return copy;
}

Volume CaptureService::ingest_scans(const std::string& volume_id, const std::vector<ImageUpload>& images,
                                    std::optional<std::uint64_t> expected_version, const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    std::lock_guard scans_lock(scans_mutex_);
    check_version(s.volume, expected_version);
    for (const auto& image : images) {
        if (auto it = scan_owner_.find(image.scan_id); it != scan_owner_.end())
            throw Error(ErrorCode::DuplicateScanId,
                        "scan '" + image.scan_id + "' already belongs to volume " + it->second,
                        {{"scan_id", image.scan_id}, {"volume_id", it->second}});
        if (!image.bytes.empty() && image_content_type(image.bytes).empty())
            throw Error(ErrorCode::InvalidRequest, "scan '" + image.scan_id + "' is neither PNG nor TIFF",
                        {{"scan_id", image.scan_id}});
    }
    json scans = json::array();
    for (const auto& image : images)
        scans.push_back({{"scan_id", image.scan_id}, {"image_ref", image.bytes.empty() ? "" : store_blob(image.bytes)}});
    const auto& v = commit(s, expected_version, {{"type", "ScansIngested"}, {"scans", scans}}, operator_name);
    for (const auto& image : images) scan_owner_[image.scan_id] = volume_id;
    return v;
}

PageAssignment CaptureService::assign_page(const std::string& volume_id, const std::string& scan_id,
                                           const std::string& label, std::optional<std::uint64_t> expected_version,
                                           const std::string& operator_name) {
    auto parsed = parse_page_label(label);
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    const auto& v = commit(s, expected_version,
                           {{"type", "PageAssigned"}, {"scan_id", scan_id}, {"label", format_page_label(parsed)}},
                           operator_name);
    return *v.assignment(scan_id);
}

PageAssignment CaptureService::set_override(const std::string& volume_id, const std::string& scan_id,
                                            const std::string& label, const std::string& note,
                                            std::optional<std::uint64_t> expected_version,
                                            const std::string& operator_name) {
    auto parsed = parse_page_label(label);
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    const auto& v = commit(
        s, expected_version,
        {{"type", "OverrideSet"}, {"scan_id", scan_id}, {"label", format_page_label(parsed)}, {"note", note}},
        operator_name);
    return *v.assignment(scan_id);
}

ScanImage CaptureService::mark_duplicate(const std::string& volume_id, const std::string& scan_id,
                                         std::optional<std::uint64_t> expected_version,
                                         const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return commit(s, expected_version, {{"type", "DuplicateMarked"}, {"scan_id", scan_id}}, operator_name).scan(scan_id);
}

ScanImage CaptureService::unmark_duplicate(const std::string& volume_id, const std::string& scan_id,
                                           std::optional<std::uint64_t> expected_version,
                                           const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return commit(s, expected_version, {{"type", "DuplicateUnmarked"}, {"scan_id", scan_id}}, operator_name)
        .scan(scan_id);
}

std::optional<PageLabel> CaptureService::suggest_next_label(const std::string& volume_id,
                                                            const std::string& scan_id) const {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return s.volume.suggest_next_label(scan_id);
}

PaginationReport CaptureService::verify_pagination(const std::string& volume_id) const {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return s.volume.verify_pagination();
}

Volume CaptureService::transition_to_article_mode(const std::string& volume_id, std::uint64_t expected_version,
                                                  const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return commit(s, expected_version, {{"type", "ArticleModeEntered"}}, operator_name);
}

Volume CaptureService::reopen_pagination(const std::string& volume_id, std::uint64_t expected_version,
                                         const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return commit(s, expected_version, {{"type", "PaginationReopened"}}, operator_name);
}

ArticleOutcome CaptureService::create_article(const std::string& volume_id, const ArticleFields& fields,
                                              std::optional<std::uint64_t> expected_version,
                                              const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    check_version(s.volume, expected_version);
    auto record = s.volume.prepare_article(fields);

    // Dedup against everything finalized under the stem plus this volume's own codes.
    auto existing = finalized_codes(s.volume.metadata().stem);
    for (const auto& a : s.volume.articles())
        if (a.bibcode) existing.insert(format_bibcode(*a.bibcode));
    ArticleOutcome outcome;
    try {
        record.bibcode = derive_bibcode(record, s.volume.metadata(), existing);
    } catch (const Error& e) {
        outcome.bibcode_error = json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
    const auto& v = commit(s, expected_version, article_event(record), operator_name);
    outcome.article = v.article(record.article_id);
    outcome.version = v.version();
    return outcome;
}

Volume CaptureService::remove_article(const std::string& volume_id, const std::string& article_id,
                                      std::optional<std::uint64_t> expected_version,
                                      const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return commit(s, expected_version, {{"type", "ArticleRemoved"}, {"article_id", article_id}}, operator_name);
}

FinalizeOutcome CaptureService::finalize_volume(const std::string& volume_id, std::uint64_t expected_version,
                                                const std::string& operator_name) {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    check_version(s.volume, expected_version);
    {
        // Dry run surfaces WrongState / NoArticles / UnderivedBibcodes first.
        std::map<std::string, Bibcode, std::less<>> current;
        for (const auto& a : s.volume.articles())
            if (a.bibcode) current.emplace(a.article_id, *a.bibcode);
        Volume probe = s.volume;
        probe.finalize(current);
    }

    // The stem's code set is read and extended under one lock so that two
    // volumes of the same journal cannot both claim a code.
    std::lock_guard codes_lock(codes_mutex_);
    const auto& stem = s.volume.metadata().stem;
    CodeSet taken = finalized_codes_[stem];
    json codes = json::object();
    for (const auto* a : s.volume.articles_in_page_order()) {
        auto final_code = assign_dedup_qualifier(taken, *a->bibcode);
        auto text = format_bibcode(final_code);
        taken.insert(text);
        codes[a->article_id] = text;
    }
    const auto& v = commit(s, expected_version, {{"type", "VolumeFinalized"}, {"bibcodes", codes}}, operator_name);
    for (const auto& [id, code] : codes.items()) finalized_codes_[stem].insert(code.get<std::string>());
    return {build_export_records(v), v.version()};
}

std::string CaptureService::export_file(const std::string& volume_id) const {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return export_records(s.volume);
}

Volume CaptureService::volume(const std::string& volume_id) const {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return s.volume;
}

std::vector<Volume> CaptureService::volumes() const {
    std::shared_lock lock(volumes_mutex_);
    std::vector<Volume> out;
    for (const auto& [id, s] : volumes_) {
        std::lock_guard slot_lock(s->mutex);
        out.push_back(s->volume);
    }
    return out;
}

std::vector<json> CaptureService::event_log(const std::string& volume_id) const {
    auto& s = slot(volume_id);
    std::lock_guard lock(s.mutex);
    return s.log;
}

std::optional<StoredImage> CaptureService::scan_image(const std::string& scan_id) const {
    std::string volume_id;
    {
        std::lock_guard lock(scans_mutex_);
        auto it = scan_owner_.find(scan_id);
        if (it == scan_owner_.end()) return std::nullopt;
        volume_id = it->second;
    }
    auto ref = volume(volume_id).scan(scan_id).image_ref;
    if (ref.empty()) return std::nullopt;
    std::string bytes;
    if (data_dir_) {
        bytes = read_file(*data_dir_ / "blobs" / ref);
    } else {
        std::lock_guard lock(blobs_mutex_);
        auto it = memory_blobs_.find(ref);
        if (it == memory_blobs_.end()) return std::nullopt;
        bytes = it->second;
    }
    auto type = image_content_type(bytes);
    return StoredImage{std::move(bytes), std::move(type)};
}

CodeSet CaptureService::finalized_codes(const std::string& stem) const {
    std::lock_guard lock(codes_mutex_);
    auto it = finalized_codes_.find(stem);
    return it == finalized_codes_.end() ? CodeSet{} : it->second;
}

}  // namespace histscan
