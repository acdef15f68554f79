#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace placeloc {

struct ManifestRow {
    std::string path;  ///< as written; relative paths resolve against the manifest directory
    std::string label;
    int sequence = 0;
};

/// TSV with header `path<TAB>label<TAB>sequence`.
struct Manifest {
    std::vector<ManifestRow> rows;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const ManifestRow& row) const;
    /// Sorted distinct labels.
    std::vector<std::string> labels() const;
    /// Rows whose sequence id is listed, in manifest order.
    Manifest select(const std::vector<int>& sequences) const;
};

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir = {});
Manifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_tsv(const Manifest& manifest);

}  // namespace placeloc
