#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "histscan/service.hpp"
#include "histscan/workflow.hpp"

namespace histscan {

/// A volume laid out on disk for batch import:
///
///   volume.json    volume_id, full_title, series, volume, publication_year, publication_month
///   pages.tsv      page table (same layout as the service snapshot)
///   articles.tsv   optional; the bibcode column is ignored on import
///   scans/         optional <scan_id>.png / .tif / .tiff images
///   abstracts/     files named by articles.tsv abstract_ref
struct VolumeDirectory {
    VolumeRequest request;
    std::vector<PagesRow> pages;
    std::vector<ArticlesRow> articles;
    std::map<std::string, std::string> images;     // scan id -> bytes
    std::map<std::string, std::string> abstracts;  // article id -> text
};

/// Throws IoError for unreadable files, ParseError for malformed tables.
VolumeDirectory read_volume_dir(const std::filesystem::path& dir);

/// Creates the volume, ingests its scans and replays the page table. With
/// `enter_articles` and a non-empty article table it then moves the volume
/// to article entry and creates every article. Returns the volume id.
std::string import_volume(CaptureService& service, const VolumeDirectory& dir, bool enter_articles,
                          const std::string& operator_name = {});

enum class OutputFormat { ExportBlock, Tsv };

/// Runs a volume directory through the whole workflow in memory and returns
/// the finalized export (or the articles.tsv snapshot for OutputFormat::Tsv).
std::string derive_volume(const Registry& registry, const std::filesystem::path& dir,
                          OutputFormat format = OutputFormat::ExportBlock);

}  // namespace histscan
