#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "histscan/registry.hpp"
#include "histscan/volume.hpp"
#include "histscan/workflow.hpp"

namespace histscan {

struct VolumeRequest {
    std::string volume_id;  // generated from stem, volume and year when empty
    std::string full_title;
    std::string series;
    std::string volume;  // "4" or a type code such as "conf"
    int publication_year = 0;
    int publication_month = 0;
};

struct ImageUpload {
    std::string scan_id;
    std::string bytes;  // PNG or TIFF; empty when no image is available
};

struct StoredImage {
    std::string bytes;
    std::string content_type;
};

struct ArticleOutcome {
    ArticleRecord article;
    std::uint64_t version = 0;
    /// Why no bibcode could be derived ({"code", "message"}), if so.
    std::optional<nlohmann::json> bibcode_error;
};

struct FinalizeOutcome {
    std::vector<ExportRecord> records;
    std::uint64_t version = 0;
};

/// PNG/TIFF sniffing for stored scans; empty string when unrecognized.
std::string image_content_type(std::string_view bytes);
std::string sha256_hex(std::string_view bytes);

/// Owns every volume, its event log and the global per-stem code sets.
///
/// Mutations take an optional expected_version: when given it must equal
/// the volume's current version or the call fails with VersionConflict and
/// nothing changes. Each accepted mutation appends one event to the
/// volume's log (and, with a data directory, to volumes/<id>/events.jsonl
/// before the in-memory state is replaced), then rewrites the snapshot
/// tables. Reads return copies and may run concurrently.
class CaptureService {
public:
    explicit CaptureService(Registry registry, std::optional<std::filesystem::path> data_dir = std::nullopt);
    ~CaptureService();

    CaptureService(const CaptureService&) = delete;
    CaptureService& operator=(const CaptureService&) = delete;

    const Registry& registry() const { return registry_; }

    Volume create_volume(const VolumeRequest& request, const std::string& operator_name = {});
    Volume ingest_scans(const std::string& volume_id, const std::vector<ImageUpload>& images,
                        std::optional<std::uint64_t> expected_version = std::nullopt,
                        const std::string& operator_name = {});

    PageAssignment assign_page(const std::string& volume_id, const std::string& scan_id, const std::string& label,
                               std::optional<std::uint64_t> expected_version = std::nullopt,
                               const std::string& operator_name = {});
    PageAssignment set_override(const std::string& volume_id, const std::string& scan_id, const std::string& label,
                                const std::string& note, std::optional<std::uint64_t> expected_version = std::nullopt,
                                const std::string& operator_name = {});
    ScanImage mark_duplicate(const std::string& volume_id, const std::string& scan_id,
                             std::optional<std::uint64_t> expected_version = std::nullopt,
                             const std::string& operator_name = {});
    ScanImage unmark_duplicate(const std::string& volume_id, const std::string& scan_id,
                               std::optional<std::uint64_t> expected_version = std::nullopt,
                               const std::string& operator_name = {});
    std::optional<PageLabel> suggest_next_label(const std::string& volume_id, const std::string& scan_id) const;
    PaginationReport verify_pagination(const std::string& volume_id) const;

    Volume transition_to_article_mode(const std::string& volume_id, std::uint64_t expected_version,
                                      const std::string& operator_name = {});
    Volume reopen_pagination(const std::string& volume_id, std::uint64_t expected_version,
                             const std::string& operator_name = {});

    ArticleOutcome create_article(const std::string& volume_id, const ArticleFields& fields,
                                  std::optional<std::uint64_t> expected_version = std::nullopt,
                                  const std::string& operator_name = {});
    Volume remove_article(const std::string& volume_id, const std::string& article_id,
                          std::optional<std::uint64_t> expected_version = std::nullopt,
                          const std::string& operator_name = {});

    FinalizeOutcome finalize_volume(const std::string& volume_id, std::uint64_t expected_version,
                                    const std::string& operator_name = {});
    std::string export_file(const std::string& volume_id) const;

    Volume volume(const std::string& volume_id) const;
    std::vector<Volume> volumes() const;
    std::vector<nlohmann::json> event_log(const std::string& volume_id) const;
    std::optional<StoredImage> scan_image(const std::string& scan_id) const;
    /// Codes finalized so far under `stem`.
    CodeSet finalized_codes(const std::string& stem) const;

private:
    struct Slot {
        mutable std::mutex mutex;
        Volume volume;
        std::vector<nlohmann::json> log;
        explicit Slot(Volume v) : volume(std::move(v)) {}
    };

    Slot& slot(const std::string& volume_id) const;
    /// Applies `event` to a copy of the slot's volume, persists it and swaps
    /// the copy in. Caller holds slot.mutex.
    const Volume& commit(Slot& slot, std::optional<std::uint64_t> expected_version, nlohmann::json event,
                         const std::string& operator_name);
    void persist(const Volume& volume, const nlohmann::json& event) const;
    void write_snapshots(const Volume& volume) const;
    void load_from_disk();
    std::string store_blob(const std::string& bytes) const;

    Registry registry_;
    std::optional<std::filesystem::path> data_dir_;

    mutable std::shared_mutex volumes_mutex_;
    std::map<std::string, std::unique_ptr<Slot>, std::less<>> volumes_;

    mutable std::mutex scans_mutex_;
    std::map<std::string, std::string, std::less<>> scan_owner_;  // scan id -> volume id

    mutable std::mutex blobs_mutex_;
    mutable std::map<std::string, std::string, std::less<>> memory_blobs_;  // used without a data directory

    mutable std::mutex codes_mutex_;
    std::map<std::string, CodeSet, std::less<>> finalized_codes_;  // stem -> codes
};

}  // namespace histscan
