#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace histscan {

/// Stable, machine-readable error codes shared by the library, the CLI and
/// the HTTP API. The spelling returned by to_string() is part of the public
/// contract and must not change.
enum class ErrorCode {
    // bibcode codec
    WrongLength,
    InvalidYear,
    InvalidStem,
    InvalidVolume,
    InvalidQualifier,
    InvalidPage,
    InvalidAuthorChar,
    Unparseable,
    UnsupportedForBibcode,
    QualifierOccupied,
    DedupExhausted,
    // bibstem registry
    ParseError,
    DuplicateStem,
    OverlappingRanges,
    BrokenContinuityLink,
    NotFound,
    Ambiguous,
    // pagination
    WrongState,
    DuplicateLabel,
    UnknownScan,
    ScanIsDuplicate,
    AlreadyMarked,
    NotMarked,
    NoAssignment,
    EmptyNote,
    // articles
    UnknownPageLabel,
    PageOrderViolation,
    StemUnresolved,
    DuplicateArticleId,
    UnknownArticle,
    // workflow
    DuplicateScanId,
    PaginationIncomplete,
    VersionConflict,
    NoArticles,
    UnderivedBibcodes,
    UnknownVolume,
    DuplicateVolumeId,
    InvalidRequest,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json details = nlohmann::json::object())
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    nlohmann::json details_;
};

}  // namespace histscan
