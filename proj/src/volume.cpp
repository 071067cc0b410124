#include "histscan/volume.hpp"

#include "histscan/error.hpp"

namespace histscan {

std::string_view to_string(VolumeState state) noexcept {
    switch (state) {
        case VolumeState::PageNumbering: return "PageNumbering";
        case VolumeState::ArticleEntry: return "ArticleEntry";
        case VolumeState::Finalized: return "Finalized";
    }
    return "PageNumbering";
}

std::string_view to_string(ScanStatus status) noexcept {
    return status == ScanStatus::Active ? "Active" : "MarkedDuplicate";
}

VolumeState volume_state_from_string(std::string_view text) {
    for (auto s : {VolumeState::PageNumbering, VolumeState::ArticleEntry, VolumeState::Finalized})
        if (to_string(s) == text) return s;
    throw Error(ErrorCode::InvalidRequest, "unknown volume state '" + std::string(text) + "'");
}

ScanStatus scan_status_from_string(std::string_view text) {
    for (auto s : {ScanStatus::Active, ScanStatus::MarkedDuplicate})
        if (to_string(s) == text) return s;
    throw Error(ErrorCode::InvalidRequest, "unknown scan status '" + std::string(text) + "'");
}

Volume::Volume(VolumeMetadata metadata) : metadata_(std::move(metadata)) {
    if (metadata_.volume_id.empty()) throw Error(ErrorCode::InvalidRequest, "volume id must not be empty");
    if (metadata_.publication_year < 1000 || metadata_.publication_year > 9999)
        throw Error(ErrorCode::InvalidYear, "publication year " + std::to_string(metadata_.publication_year) +
                                                " outside 1000-9999");
    if (metadata_.publication_month < 0 || metadata_.publication_month > 12)
        throw Error(ErrorCode::InvalidRequest, "publication month must be 0-12");
    if (!is_valid_bibstem(metadata_.stem))
        throw Error(ErrorCode::StemUnresolved, "volume has no usable journal stem");
}

void Volume::require_state(VolumeState wanted, std::string_view operation) const {
    if (state_ != wanted)
        throw Error(ErrorCode::WrongState,
                    std::string(operation) + " needs state " + std::string(to_string(wanted)) + ", volume is " +
                        std::string(to_string(state_)),
                    {{"state", std::string(to_string(state_))}, {"required", std::string(to_string(wanted))}});
}

const ScanImage* Volume::find_scan(std::string_view scan_id) const {
    auto it = scan_positions_.find(scan_id);
    return it == scan_positions_.end() ? nullptr : &scans_[it->second];
}

std::size_t Volume::scan_index(std::string_view scan_id) const {
    auto it = scan_positions_.find(scan_id);
    if (it == scan_positions_.end())
        throw Error(ErrorCode::UnknownScan, "no scan '" + std::string(scan_id) + "' in volume " + id(),
                    {{"scan_id", std::string(scan_id)}});
    return it->second;
}

const ScanImage& Volume::scan(std::string_view scan_id) const { return scans_[scan_index(scan_id)]; }

const PageAssignment* Volume::assignment(std::string_view scan_id) const {
    auto it = assignments_.find(scan_id);
    return it == assignments_.end() ? nullptr : &it->second;
}

std::optional<PageLabel> Volume::effective_label(std::string_view scan_id) const {
    const auto* s = find_scan(scan_id);
    const auto* a = assignment(scan_id);
    if (!s || !a || s->status != ScanStatus::Active) return std::nullopt;
    return a->effective();
}

void Volume::transition_to_article_mode() {
    require_state(VolumeState::PageNumbering, "transition_to_article_mode");
    auto report = verify_pagination();
    if (!report.complete) {
        nlohmann::json conflicts = nlohmann::json::array();
        for (const auto& c : report.conflicts) conflicts.push_back({{"label", c.label}, {"scan_ids", c.scan_ids}});
        throw Error(ErrorCode::PaginationIncomplete,
                    std::to_string(report.unlabeled.size()) + " unlabeled scan(s), " +
                        std::to_string(report.conflicts.size()) + " conflicting label(s)",
                    {{"report", {{"complete", false}, {"unlabeled", report.unlabeled}, {"conflicts", conflicts}}}});
    }
    state_ = VolumeState::ArticleEntry;
    bump();
}

void Volume::reopen_pagination() {
    require_state(VolumeState::ArticleEntry, "reopen_pagination");
    if (!articles_.empty())
        throw Error(ErrorCode::WrongState, "cannot reopen page numbering once articles exist",
                    {{"articles", articles_.size()}});
    state_ = VolumeState::PageNumbering;
    bump();
}

void Volume::finalize(const std::map<std::string, Bibcode, std::less<>>& bibcodes) {
    require_state(VolumeState::ArticleEntry, "finalize_volume");
    if (articles_.empty()) throw Error(ErrorCode::NoArticles, "volume " + id() + " has no articles");
    std::vector<std::string> underived;
    for (const auto& a : articles_)
        if (!a.bibcode) underived.push_back(a.article_id);
    if (!underived.empty())
        throw Error(ErrorCode::UnderivedBibcodes, std::to_string(underived.size()) + " article(s) lack a bibcode",
                    {{"articles", underived}});
    for (const auto& a : articles_)
        if (!bibcodes.contains(a.article_id))
            throw Error(ErrorCode::InvalidRequest, "no final bibcode supplied for " + a.article_id);
    for (auto& a : articles_) a.bibcode = bibcodes.find(a.article_id)->second;
    state_ = VolumeState::Finalized;
    bump();
}

}  // namespace histscan
