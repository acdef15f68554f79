#pragma once

#include <map>
#include <string>
#include <vector>

#include "placeloc/dissimilarity.hpp"
#include "placeloc/histogram.hpp"

namespace placeloc {

struct PartSpec {
    std::string name;        ///< rgb | hsv | bovw
    std::string measure_id;  ///< see Measure::parse
    double weight = 1.0;
};

/// Which feature parts are active, how each is compared, and how the part
/// distances are weighted. Weights must be non-negative and sum to one.
class FeatureConfig {
public:
    explicit FeatureConfig(std::vector<PartSpec> parts);

    const std::vector<PartSpec>& parts() const { return parts_; }
    const Measure& measure(std::size_t i) const { return measures_[i]; }
    std::size_t size() const { return parts_.size(); }
    bool has(const std::string& name) const;
    /// Canonical text identity, e.g. "rgb:jeffrey@0.5+hsv:bhattacharyya@0.5".
    std::string id() const;

private:
    std::vector<PartSpec> parts_;
    std::vector<Measure> measures_;
};

/// Default measure for a part name: jeffrey for rgb, bhattacharyya for hsv,
/// minkowski:1 for bovw.
std::string default_measure_for(const std::string& part);

/// One histogram per configured part, in configuration order.
struct CompositeFeature {
    std::vector<FeatureHistogram> parts;
};

struct LabeledFeature {
    std::string label;
    CompositeFeature feature;
};

/// Weighted sum of per-part dissimilarities.
double composite_distance(const FeatureConfig& config, const CompositeFeature& a, const CompositeFeature& b);

/// Concatenation of the parts, each scaled by sqrt(weight), so squared
/// Euclidean distance on the result is the weighted sum of part distances.
std::vector<double> flatten(const FeatureConfig& config, const CompositeFeature& f);

}  // namespace placeloc
