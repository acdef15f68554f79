#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "placeloc/bovw.hpp"
#include "placeloc/composite.hpp"
#include "placeloc/nn.hpp"
#include "placeloc/sift.hpp"
#include "placeloc/svm.hpp"

namespace placeloc {

/// Flat `section.key = value` text. Blank lines and lines starting with '#'
/// are ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);

enum class LocalFeatureKind { Sift, RgbSift, Asift };

struct PipelineConfig {
    std::vector<std::string> parts{"bovw", "hsv", "rgb"};
    std::map<std::string, std::string> measures;  ///< per part; missing = default_measure_for
    std::map<std::string, double> weights;        ///< per part; missing = 1 / parts.size()
    std::vector<int> rgb_bins{kDefaultRgbBins, kDefaultRgbBins, kDefaultRgbBins};
    std::vector<int> hsv_bins{kDefaultHueBins, kDefaultSatBins, kDefaultValBins};
    LocalFeatureKind local = LocalFeatureKind::Sift;
    SiftParams sift;

    enum class VocabMethod { Kmeans, Incremental };
    VocabMethod vocab_method = VocabMethod::Kmeans;
    int vocab_k = kDefaultVocabularySize;
    std::string vocab_distance = "euclidean";
    double vocab_threshold = 0.5;
    int vocab_max_iter = 100;
    std::size_t vocab_sample_cap = kDefaultDescriptorCap;

    std::string classifier = "svm";  ///< svm | nn
    KernelSpec::Kind kernel = KernelSpec::Kind::Rbf;
    double svm_c = 10.0;
    double rbf_sigma = 0.0;  ///< 0 = median heuristic
    double linear_c = 0.0;
    GaParams ga;

    std::vector<int> train_sequences{1, 3};
    std::vector<int> test_sequences{2};
    std::uint64_t seed = 0;

    /// Throws InvalidArgument on unknown keys or bad values.
    static PipelineConfig from_key_values(const std::map<std::string, std::string>& kv);
    static PipelineConfig load(const std::filesystem::path& path);

    FeatureConfig feature_config() const;
    /// Identity of everything that shapes a feature vector.
    std::string config_id() const;
    /// Identity of the per-image extraction settings (cache key).
    std::string extraction_id() const;
    KernelSpec kernel_spec(double sigma) const;
};

}  // namespace placeloc
