#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "placeloc/composite.hpp"

namespace placeloc {

/// Per-class rejection thresholds on the composite distance: the nearest
/// neighbor's label is kept iff its distance is <= the threshold of that
/// label.
using ThresholdSet = std::map<std::string, double>;

/// Thresholds that accept or reject everything.
ThresholdSet permissive_thresholds(const std::vector<std::string>& labels);
ThresholdSet strict_thresholds(const std::vector<std::string>& labels);

struct NnResult {
    std::string label;      ///< candidate or UNKNOWN
    std::string candidate;  ///< label of the nearest gallery item
    double distance = 0.0;
};

/// Nearest gallery item; distance ties go to the lexically lowest label.
NnResult nearest_neighbor(const FeatureConfig& config, const CompositeFeature& query,
                          const std::vector<LabeledFeature>& gallery);

NnResult nn_classify(const FeatureConfig& config, const CompositeFeature& query,
                     const std::vector<LabeledFeature>& gallery, const ThresholdSet& thresholds);

struct GaParams {
    int population = 200;
    double mutation_rate = 0.15;
    double crossover_rate = 0.7;
    int generations = 1000;
    int elitism = 2;
    double mutation_scale = 0.05;  ///< Gaussian step as a fraction of the gene range
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

/// A validation item reduced to what thresholding needs.
struct NnObservation {
    std::string truth;
    std::string candidate;
    double distance = 0.0;
};

struct GaTrace {
    std::vector<double> best_fitness;  ///< best-so-far after each generation
    double upper_bound = 0.0;          ///< gene range is [0, upper_bound]
};

/// Micro F-measure of thresholded predictions.
double threshold_fitness(const std::vector<NnObservation>& observations, const ThresholdSet& thresholds);

/// Real-coded GA (rank selection, elitism, blend crossover, Gaussian
/// mutation) over one threshold per label.
ThresholdSet ga_optimize_thresholds(const std::vector<NnObservation>& observations,
                                    const std::vector<std::string>& labels, const GaParams& params,
                                    GaTrace* trace = nullptr);

/// Convenience form: nearest neighbors of `validation` in `train` first.
ThresholdSet ga_optimize_thresholds(const FeatureConfig& config, const std::vector<LabeledFeature>& train,
                                    const std::vector<LabeledFeature>& validation, const GaParams& params,
                                    GaTrace* trace = nullptr);

}  // namespace placeloc
