#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "placeloc/sift.hpp"

namespace placeloc {

inline constexpr std::uint32_t kDescriptorFileVersion = 1;

/// Binary layout: "PLDS", u32 version, u64 count, u32 dim, then per record
/// x, y, sigma, orientation and dim values, all float32 little-endian.
void write_descriptors(std::ostream& out, const std::vector<LocalFeature>& features);
std::vector<LocalFeature> read_descriptors(std::istream& in);

void save_descriptors(const std::filesystem::path& path, const std::vector<LocalFeature>& features);
std::vector<LocalFeature> load_descriptors(const std::filesystem::path& path);

/// Header `x,y,sigma,orientation,d0,...` then one row per feature.
std::string descriptors_to_csv(const std::vector<LocalFeature>& features);

}  // namespace placeloc
