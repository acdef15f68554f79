#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "placeloc/image.hpp"
#include "placeloc/manifest.hpp"

namespace placeloc {

/// Procedural stand-in for an indoor place dataset. Classes come in pairs
/// that share a color palette and differ only in texture, so color alone
/// cannot separate them. Each sequence has its own lighting level.
struct SynthSpec {
    int classes = 9;
    int sequences = 3;
    int per_sequence = 20;
    int size = 128;
    std::uint64_t seed = 0;
};

/// Class names used by the generator, one per class index (at most 9).
const std::vector<std::string>& synth_class_names();

Image render_synthetic(int class_index, int sequence, int item, const SynthSpec& spec);

/// Writes images/<Class>/s<seq>_<item>.ppm and manifest.tsv under `dir`;
/// returns the manifest.
Manifest write_synthetic_dataset(const std::filesystem::path& dir, const SynthSpec& spec);

}  // namespace placeloc
