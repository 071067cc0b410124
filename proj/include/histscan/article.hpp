#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "histscan/bibcode.hpp"
#include "histscan/volume.hpp"

namespace histscan {

struct YearSpan {
    int start_year = 0;
    int end_year = 0;

    bool operator==(const YearSpan&) const = default;
};

/// Report years named in a title ("for the year 1923", "for the Years 1900
/// to 1904", "for the years 1900-1904"). Display metadata only: bibcodes
/// always carry the publication year.
std::optional<YearSpan> extract_report_years(std::string_view title);

/// Builds the article's bibcode from the volume's publication year, stem and
/// volume field, the first page label and the first author, then separates
/// it from `existing` with a Q-Z qualifier when needed.
///
/// Throws UnsupportedForBibcode, InvalidPage, QualifierOccupied, DedupExhausted.
Bibcode derive_bibcode(const ArticleRecord& article, const VolumeMetadata& volume, const CodeSet& existing = {});

/// "<title>, vol. <n>, pp. <first>-<last>" or "..., p. <first>" for one page.
std::string format_journal_ref(const ArticleRecord& article, const VolumeMetadata& volume);

/// "MM/YYYY" with 00 for an unknown month.
std::string format_publication_date(const VolumeMetadata& volume);

}  // namespace histscan
