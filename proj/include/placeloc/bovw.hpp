#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "placeloc/dissimilarity.hpp"
#include "placeloc/histogram.hpp"

namespace placeloc {

using DescriptorSet = std::vector<std::vector<double>>;

/// Normalized word-frequency histogram (Binning::Kind::Bovw).
using BowVector = FeatureHistogram;

class Vocabulary {
public:
    enum class BuiltBy : std::uint8_t { Kmeans = 0, Incremental = 1 };

    Vocabulary(DescriptorSet centers, std::string distance_id, BuiltBy built_by, std::uint64_t seed);

    std::size_t size() const { return centers_.size(); }
    std::size_t dim() const { return centers_.front().size(); }
    const DescriptorSet& centers() const { return centers_; }
    const std::string& distance_id() const { return distance_id_; }
    const Measure& measure() const { return measure_; }
    BuiltBy built_by() const { return built_by_; }
    std::uint64_t seed() const { return seed_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.centers_ == b.centers_ && a.distance_id_ == b.distance_id_ && a.built_by_ == b.built_by_ &&
               a.seed_ == b.seed_;
    }

private:
    DescriptorSet centers_;
    std::string distance_id_;
    Measure measure_;
    BuiltBy built_by_;
    std::uint64_t seed_;
};

std::string to_string(Vocabulary::BuiltBy b);

inline constexpr int kDefaultVocabularySize = 100;
inline constexpr std::size_t kDefaultDescriptorCap = 200000;

struct KmeansParams {
    int k = kDefaultVocabularySize;
    std::string distance_id = "euclidean";
    std::uint64_t seed = 0;
    int max_iter = 100;
    unsigned jobs = 1;
};

/// Per-iteration record. `cost` follows each assignment step: the sum of
/// squared distances for the Euclidean measure, the plain sum otherwise.
struct KmeansTrace {
    std::vector<double> cost;
    std::vector<int> assignment;
    int iterations = 0;
    bool converged = false;
};

/// k-means++ seeding followed by Lloyd iterations. Centers are updated with
/// the arithmetic mean whatever the assignment distance.
Vocabulary kmeans(const DescriptorSet& descriptors, const KmeansParams& params, KmeansTrace* trace = nullptr);

/// Single pass in input order: each L1-normalized descriptor either matches
/// an existing word within `threshold` or becomes a new word.
Vocabulary incremental_vocab(const DescriptorSet& descriptors, double threshold,
                             const std::string& distance_id = "euclidean");

/// Nearest center; ties go to the lowest index.
std::size_t quantize(std::span<const double> x, const Vocabulary& vocab);

/// Word counts divided by the number of descriptors. Throws DataError on an
/// empty set.
BowVector encode_image(const DescriptorSet& descriptors, const Vocabulary& vocab);

/// Uniform subsample without replacement, original order kept.
DescriptorSet sample_descriptors(const DescriptorSet& descriptors, std::size_t cap, std::uint64_t seed);

void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);
void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);
std::string vocabulary_to_csv(const Vocabulary& vocab);

}  // namespace placeloc
