#include <algorithm>
#include <map>

#include "histscan/error.hpp"
#include "histscan/volume.hpp"

namespace histscan {

const ScanImage* Volume::scan_with_label(const PageLabel& label) const {
    for (const auto& [scan_id, a] : assignments_) {
        const auto& s = scans_[scan_positions_.find(scan_id)->second];
        if (s.status == ScanStatus::Active && a.effective().same_page(label)) return &s;
    }
    return nullptr;
}

void Volume::require_unused(const PageLabel& label, std::string_view scan_id) const {
    const auto* holder = scan_with_label(label);
    if (holder && holder->scan_id != scan_id)
        throw Error(ErrorCode::DuplicateLabel,
                    "label '" + format_page_label(label) + "' is already used by scan '" + holder->scan_id + "'",
                    {{"label", format_page_label(label)}, {"conflicting_scan", holder->scan_id}});
}

const ScanImage& Volume::active_scan(std::string_view scan_id) const {
    const auto& s = scan(scan_id);
    if (s.status != ScanStatus::Active)
        throw Error(ErrorCode::ScanIsDuplicate, "scan '" + s.scan_id + "' is marked duplicate", {{"scan_id", s.scan_id}});
    return s;
}

PageLabel Volume::bind_ordinal(PageLabel label, const ScanImage& scan) const {
    if (label.needs_ordinal()) label.primary = scan.sequence_index + 1;
    return label;
}

void Volume::ingest_scans(const std::vector<ScanImage>& images) {
    require_state(VolumeState::PageNumbering, "ingest_scans");
    std::map<std::string_view, int> batch;
    for (const auto& image : images) {
        if (image.scan_id.empty()) throw Error(ErrorCode::InvalidRequest, "scan id must not be empty");
        if (find_scan(image.scan_id) || !batch.emplace(image.scan_id, 0).second)
            throw Error(ErrorCode::DuplicateScanId, "scan '" + image.scan_id + "' already ingested",
                        {{"scan_id", image.scan_id}});
    }
    for (const auto& image : images) {
        ScanImage s = image;
        s.sequence_index = static_cast<int>(scans_.size());
        s.status = ScanStatus::Active;
        scan_positions_[s.scan_id] = scans_.size();
        scans_.push_back(std::move(s));
    }
    bump();
}

const PageAssignment& Volume::assign_page(std::string_view scan_id, PageLabel label) {
    require_state(VolumeState::PageNumbering, "assign_page");
    const auto& s = active_scan(scan_id);
    label = bind_ordinal(label, s);
    require_unused(label, scan_id);
    auto& slot = assignments_[s.scan_id];
    slot = PageAssignment{s.scan_id, label, std::nullopt};
    bump();
    return slot;
}

std::optional<PageLabel> Volume::suggest_next_label(std::string_view scan_id) const {
    auto position = scan_index(scan_id);
    for (auto i = position; i-- > 0;) {
        auto precedent = effective_label(scans_[i].scan_id);
        if (!precedent) continue;
        auto candidate = next_label(*precedent);
        if (!candidate) continue;  // plates and unnumbered leaves don't seed a sequence
        // Skip forward past labels that are already taken elsewhere.
        while (candidate) {
            const auto* holder = scan_with_label(*candidate);
            if (!holder || holder->scan_id == scan_id) return candidate;
            candidate = next_label(*candidate);
        }
        return std::nullopt;
    }
    return std::nullopt;
}

const ScanImage& Volume::mark_duplicate(std::string_view scan_id) {
    require_state(VolumeState::PageNumbering, "mark_duplicate");
    auto& s = scans_[scan_index(scan_id)];
    if (s.status == ScanStatus::MarkedDuplicate)
        throw Error(ErrorCode::AlreadyMarked, "scan '" + s.scan_id + "' is already marked duplicate",
                    {{"scan_id", s.scan_id}});
    s.status = ScanStatus::MarkedDuplicate;
    bump();
    return s;
}

const ScanImage& Volume::unmark_duplicate(std::string_view scan_id) {
    require_state(VolumeState::PageNumbering, "unmark_duplicate");
    auto& s = scans_[scan_index(scan_id)];
    if (s.status != ScanStatus::MarkedDuplicate)
        throw Error(ErrorCode::NotMarked, "scan '" + s.scan_id + "' is not marked duplicate", {{"scan_id", s.scan_id}});
    // The retained assignment comes back into the uniqueness set.
    if (const auto* a = assignment(scan_id)) require_unused(a->effective(), scan_id);
    s.status = ScanStatus::Active;
    bump();
    return s;
}

const PageAssignment& Volume::set_override(std::string_view scan_id, PageLabel label, std::string note) {
    require_state(VolumeState::PageNumbering, "set_override");
    const auto& s = scan(scan_id);
    if (note.find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(ErrorCode::EmptyNote, "an override needs a note recording its source", {{"scan_id", s.scan_id}});
    if (note.find_first_of("\t\r\n") != std::string::npos)
        throw Error(ErrorCode::InvalidRequest, "override notes cannot contain tabs or line breaks");
    auto it = assignments_.find(scan_id);
    if (it == assignments_.end())
        throw Error(ErrorCode::NoAssignment, "scan '" + s.scan_id + "' has no page label to override",
                    {{"scan_id", s.scan_id}});
    active_scan(scan_id);
    label = bind_ordinal(label, s);
    require_unused(label, scan_id);
    it->second.override_label = LabelOverride{label, std::move(note)};
    bump();
    return it->second;
}

PaginationReport Volume::verify_pagination() const {
    PaginationReport report;
    std::map<decltype(PageLabel{}.key()), LabelConflict> seen;
    for (const auto& s : scans_) {
        if (s.status != ScanStatus::Active) continue;
        auto label = effective_label(s.scan_id);
        if (!label) {
            report.unlabeled.push_back(s.scan_id);
            continue;
        }
        auto& group = seen[label->key()];
        group.label = format_page_label(*label);
        group.scan_ids.push_back(s.scan_id);
    }
    for (auto& [key, group] : seen)
        if (group.scan_ids.size() > 1) report.conflicts.push_back(std::move(group));
    report.complete = report.unlabeled.empty() && report.conflicts.empty();
    return report;
}

}  // namespace histscan
