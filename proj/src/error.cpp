#include "histscan/error.hpp"

namespace histscan {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::WrongLength: return "WrongLength";
        case ErrorCode::InvalidYear: return "InvalidYear";
        case ErrorCode::InvalidStem: return "InvalidStem";
        case ErrorCode::InvalidVolume: return "InvalidVolume";
        case ErrorCode::InvalidQualifier: return "InvalidQualifier";
        case ErrorCode::InvalidPage: return "InvalidPage";
        case ErrorCode::InvalidAuthorChar: return "InvalidAuthorChar";
        case ErrorCode::Unparseable: return "Unparseable";
        case ErrorCode::UnsupportedForBibcode: return "UnsupportedForBibcode";
        case ErrorCode::QualifierOccupied: return "QualifierOccupied";
        case ErrorCode::DedupExhausted: return "DedupExhausted";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DuplicateStem: return "DuplicateStem";
        case ErrorCode::OverlappingRanges: return "OverlappingRanges";
        case ErrorCode::BrokenContinuityLink: return "BrokenContinuityLink";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::Ambiguous: return "Ambiguous";
        case ErrorCode::WrongState: return "WrongState";
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::UnknownScan: return "UnknownScan";
        case ErrorCode::ScanIsDuplicate: return "ScanIsDuplicate";
        case ErrorCode::AlreadyMarked: return "AlreadyMarked";
        case ErrorCode::NotMarked: return "NotMarked";
        case ErrorCode::NoAssignment: return "NoAssignment";
        case ErrorCode::EmptyNote: return "EmptyNote";
        case ErrorCode::UnknownPageLabel: return "UnknownPageLabel";
        case ErrorCode::PageOrderViolation: return "PageOrderViolation";
        case ErrorCode::StemUnresolved: return "StemUnresolved";
        case ErrorCode::DuplicateArticleId: return "DuplicateArticleId";
        case ErrorCode::UnknownArticle: return "UnknownArticle";
        case ErrorCode::DuplicateScanId: return "DuplicateScanId";
        case ErrorCode::PaginationIncomplete: return "PaginationIncomplete";
        case ErrorCode::VersionConflict: return "VersionConflict";
        case ErrorCode::NoArticles: return "NoArticles";
        case ErrorCode::UnderivedBibcodes: return "UnderivedBibcodes";
        case ErrorCode::UnknownVolume: return "UnknownVolume";
        case ErrorCode::DuplicateVolumeId: return "DuplicateVolumeId";
        case ErrorCode::InvalidRequest: return "InvalidRequest";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace histscan
