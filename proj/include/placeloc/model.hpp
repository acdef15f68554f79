#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "placeloc/composite.hpp"
#include "placeloc/nn.hpp"
#include "placeloc/svm.hpp"

namespace placeloc {

/// A trained classifier plus the feature configuration it expects.
struct ClassifierModel {
    enum class Kind : std::uint8_t { Svm = 0, Nn = 1 };

    Kind kind = Kind::Svm;
    std::string config_id;
    std::vector<PartSpec> parts;
    std::vector<std::string> labels;
    OvaModel svm;                          ///< Kind::Svm
    std::vector<LabeledFeature> gallery;   ///< Kind::Nn
    ThresholdSet thresholds;               ///< Kind::Nn

    FeatureConfig config() const { return FeatureConfig(parts); }
};

struct Prediction {
    std::string label;      ///< may be UNKNOWN
    std::string candidate;  ///< best class before rejection
    double score = 0.0;     ///< higher is better (svm decision value, negated nn distance)
};

/// Throws DataError when `config_id` differs from the model's.
void check_config(const ClassifierModel& model, const std::string& config_id);

Prediction predict(const ClassifierModel& model, const CompositeFeature& feature);

void write_model(std::ostream& out, const ClassifierModel& model);
ClassifierModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace placeloc
