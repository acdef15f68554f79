#include "placeloc/descriptor_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "placeloc/binary_io.hpp"
#include "placeloc/error.hpp"

namespace placeloc {

namespace {

constexpr char kMagic[5] = "PLDS";
constexpr std::uint32_t kMaxDim = 1u << 16;

void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out += buf;
}

}  // namespace

void write_descriptors(std::ostream& out, const std::vector<LocalFeature>& features) {
    const std::size_t dim = features.empty() ? 0 : features.front().descriptor.values.size();
    for (const auto& f : features) {
        if (f.descriptor.values.size() != dim) throw InvalidArgument("descriptors differ in dimension");
    }
    io::write_magic(out, kMagic);
    io::write_le<std::uint32_t>(out, kDescriptorFileVersion);
    io::write_le<std::uint64_t>(out, features.size());
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
    for (const auto& f : features) {
        io::write_le<float>(out, static_cast<float>(f.keypoint.x));
        io::write_le<float>(out, static_cast<float>(f.keypoint.y));
        io::write_le<float>(out, static_cast<float>(f.keypoint.sigma));
        io::write_le<float>(out, static_cast<float>(f.keypoint.orientation));
        for (double v : f.descriptor.values) io::write_le<float>(out, static_cast<float>(v));
    }
}

std::vector<LocalFeature> read_descriptors(std::istream& in) {
    io::expect_magic(in, kMagic, "descriptor");
    const auto version = io::read_le<std::uint32_t>(in);
    if (version != kDescriptorFileVersion) {
        throw DataError("unsupported descriptor file version " + std::to_string(version));
    }
    const auto count = io::read_le<std::uint64_t>(in);
    const auto dim = io::read_le<std::uint32_t>(in);
    if (dim > kMaxDim) throw DataError("descriptor dimension " + std::to_string(dim) + " is implausible");
    std::vector<LocalFeature> features;
    for (std::uint64_t i = 0; i < count; ++i) {
        LocalFeature f;
        f.keypoint.x = io::read_le<float>(in);
        f.keypoint.y = io::read_le<float>(in);
        f.keypoint.sigma = io::read_le<float>(in);
        f.keypoint.orientation = io::read_le<float>(in);
        f.descriptor.values.resize(dim);
        for (auto& v : f.descriptor.values) v = io::read_le<float>(in);
        features.push_back(std::move(f));
    }
    return features;
}

void save_descriptors(const std::filesystem::path& path, const std::vector<LocalFeature>& features) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_descriptors(out, features);
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<LocalFeature> load_descriptors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_descriptors(in);
}

std::string descriptors_to_csv(const std::vector<LocalFeature>& features) {
    const std::size_t dim = features.empty() ? 0 : features.front().descriptor.values.size();
    std::string out = "x,y,sigma,orientation";
    for (std::size_t d = 0; d < dim; ++d) out += ",d" + std::to_string(d);
    out += '\n';
    for (const auto& f : features) {
        append_number(out, f.keypoint.x);
        for (double v : {f.keypoint.y, f.keypoint.sigma, f.keypoint.orientation}) {
            out += ',';
            append_number(out, v);
        }
        for (double v : f.descriptor.values) {
            out += ',';
            append_number(out, v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace placeloc
