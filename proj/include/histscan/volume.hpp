#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "histscan/bibcode.hpp"
#include "histscan/page_label.hpp"

namespace histscan {

enum class VolumeState { PageNumbering, ArticleEntry, Finalized };
enum class ScanStatus { Active, MarkedDuplicate };

std::string_view to_string(VolumeState state) noexcept;
std::string_view to_string(ScanStatus status) noexcept;
VolumeState volume_state_from_string(std::string_view text);
ScanStatus scan_status_from_string(std::string_view text);

struct VolumeMetadata {
    std::string volume_id;
    std::string full_title;
    std::string series;
    std::string stem;
    VolumeField volume;
    int publication_year = 0;
    int publication_month = 0;  // 0 = unknown

    bool operator==(const VolumeMetadata&) const = default;
};

struct ScanImage {
    std::string scan_id;
    int sequence_index = 0;
    std::string image_ref;  // content address in the blob store, may be empty
    ScanStatus status = ScanStatus::Active;

    bool operator==(const ScanImage&) const = default;
};

struct LabelOverride {
    PageLabel label;
    std::string note;

    bool operator==(const LabelOverride&) const = default;
};

struct PageAssignment {
    std::string scan_id;
    PageLabel label;
    std::optional<LabelOverride> override_label;

    const PageLabel& effective() const { return override_label ? override_label->label : label; }
    bool operator==(const PageAssignment&) const = default;
};

struct LabelConflict {
    std::string label;
    std::vector<std::string> scan_ids;
};

struct PaginationReport {
    bool complete = true;
    std::vector<std::string> unlabeled;
    std::vector<LabelConflict> conflicts;
};

struct Author {
    std::string last_name;
    std::string rest;

    bool operator==(const Author&) const = default;
};

/// "Elkin, William L." / "Elkin" when there are no given names.
std::string format_author(const Author& author);
/// Inverse of format_author; splits at the first comma.
Author parse_author(std::string_view text);

struct ArticleFields {
    std::string article_id;  // generated when empty
    std::string title;
    std::vector<Author> authors;
    PageLabel first_page;
    PageLabel last_page;
    std::optional<std::string> abstract;
};

struct ArticleRecord {
    std::string article_id;
    std::string volume_id;
    std::string title;
    std::vector<Author> authors;
    PageLabel first_page;
    PageLabel last_page;
    std::optional<std::string> abstract;
    std::optional<Bibcode> bibcode;

    bool operator==(const ArticleRecord&) const = default;
};

/// Workflow aggregate for one bound volume: its scans, their page labels
/// and the articles entered against them.
///
/// State moves PageNumbering -> ArticleEntry -> Finalized; the only way
/// back is reopen_pagination() while no articles exist. Every successful
/// mutation increments version() by exactly one; a rejected mutation
/// throws histscan::Error and leaves the volume untouched.
class Volume {
public:
    explicit Volume(VolumeMetadata metadata);

    const VolumeMetadata& metadata() const { return metadata_; }
    const std::string& id() const { return metadata_.volume_id; }
    VolumeState state() const { return state_; }
    std::uint64_t version() const { return version_; }

    const std::vector<ScanImage>& scans() const { return scans_; }
    const ScanImage& scan(std::string_view scan_id) const;
    const ScanImage* find_scan(std::string_view scan_id) const;
    const PageAssignment* assignment(std::string_view scan_id) const;
    const std::map<std::string, PageAssignment, std::less<>>& assignments() const { return assignments_; }
    /// Label of an Active, assigned scan.
    std::optional<PageLabel> effective_label(std::string_view scan_id) const;
    /// Active scan currently carrying `label`, if any.
    const ScanImage* scan_with_label(const PageLabel& label) const;

    // Page numbering stage.
    void ingest_scans(const std::vector<ScanImage>& images);
    const PageAssignment& assign_page(std::string_view scan_id, PageLabel label);
    std::optional<PageLabel> suggest_next_label(std::string_view scan_id) const;
    const ScanImage& mark_duplicate(std::string_view scan_id);
    const ScanImage& unmark_duplicate(std::string_view scan_id);
    const PageAssignment& set_override(std::string_view scan_id, PageLabel label, std::string note);
    PaginationReport verify_pagination() const;

    void transition_to_article_mode();
    void reopen_pagination();

    // Article entry stage.
    const std::vector<ArticleRecord>& articles() const { return articles_; }
    const ArticleRecord& article(std::string_view article_id) const;
    /// Articles ordered by the scan position of their first page.
    std::vector<const ArticleRecord*> articles_in_page_order() const;
    const ArticleRecord& create_article(ArticleFields fields, std::optional<Bibcode> bibcode = std::nullopt);
    void remove_article(std::string_view article_id);
    /// Validates fields against the volume without storing anything.
    ArticleRecord prepare_article(ArticleFields fields) const;

    /// Seals the volume with the final bibcode of every article.
    void finalize(const std::map<std::string, Bibcode, std::less<>>& bibcodes);

private:
    void require_state(VolumeState wanted, std::string_view operation) const;
    std::size_t scan_index(std::string_view scan_id) const;
    std::size_t position_of(const PageLabel& label) const;
    const ScanImage& active_scan(std::string_view scan_id) const;
    PageLabel bind_ordinal(PageLabel label, const ScanImage& scan) const;
    void require_unused(const PageLabel& label, std::string_view scan_id) const;
    void bump() { ++version_; }

    VolumeMetadata metadata_;
    VolumeState state_ = VolumeState::PageNumbering;
    std::uint64_t version_ = 1;
    std::vector<ScanImage> scans_;  // ordered by sequence_index
    std::map<std::string, std::size_t, std::less<>> scan_positions_;
    std::map<std::string, PageAssignment, std::less<>> assignments_;
    std::vector<ArticleRecord> articles_;
};

}  // namespace histscan
