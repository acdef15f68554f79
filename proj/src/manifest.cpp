#include "placeloc/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "placeloc/error.hpp"
#include "placeloc/eval.hpp"

namespace placeloc {

std::filesystem::path Manifest::resolve(const ManifestRow& row) const {
    const std::filesystem::path p(row.path);
    return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> Manifest::labels() const {
    std::set<std::string> s;
    for (const auto& r : rows) s.insert(r.label);
    return {s.begin(), s.end()};
}

Manifest Manifest::select(const std::vector<int>& sequences) const {
    Manifest m;
    m.base_dir = base_dir;
    for (const auto& r : rows) {
        if (std::find(sequences.begin(), sequences.end(), r.sequence) != sequences.end()) m.rows.push_back(r);
    }
    return m;
}

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("manifest is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "path\tlabel\tsequence") throw DataError("manifest header must be 'path<TAB>label<TAB>sequence'");
    Manifest m;
    m.base_dir = base_dir;
    std::set<std::string> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw DataError("manifest line " + std::to_string(lineno) + ": expected three tab-separated fields");
        }
        ManifestRow row;
        row.path = line.substr(0, t1);
        row.label = line.substr(t1 + 1, t2 - t1 - 1);
        const std::string seq = line.substr(t2 + 1);
        if (row.path.empty()) throw DataError("manifest line " + std::to_string(lineno) + ": empty path");
        if (row.label.empty() || row.label == kUnknownLabel) {
            throw DataError("manifest line " + std::to_string(lineno) + ": invalid label");
        }
        try {
            std::size_t used = 0;
            row.sequence = std::stoi(seq, &used);
            if (used != seq.size()) throw DataError("");
        } catch (const std::exception&) {
            throw DataError("manifest line " + std::to_string(lineno) + ": sequence must be an integer");
        }
        if (!seen.insert(row.path).second) {
            throw DataError("manifest line " + std::to_string(lineno) + ": duplicate path " + row.path);
        }
        m.rows.push_back(std::move(row));
    }
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read manifest " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

std::string manifest_to_tsv(const Manifest& manifest) {
    std::string out = "path\tlabel\tsequence\n";
    for (const auto& r : manifest.rows) out += r.path + "\t" + r.label + "\t" + std::to_string(r.sequence) + "\n";
    return out;
}

}  // namespace placeloc
