#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "placeloc/composite.hpp"
#include "placeloc/config.hpp"
#include "placeloc/eval.hpp"
#include "placeloc/manifest.hpp"

namespace placeloc {

/// Where a pipeline run reads and writes. Every artifact lives under
/// `workspace` except per-image features, which may be shared between runs.
struct PipelineContext {
    PipelineConfig config;
    std::filesystem::path workspace;
    std::filesystem::path features_dir;  ///< empty = workspace/features
    unsigned jobs = 1;
    std::ostream* log = nullptr;  ///< progress and warnings; null = silent

    std::filesystem::path features() const;
    std::filesystem::path vocabulary_path() const { return workspace / "vocab.bin"; }
    std::filesystem::path bovw_dir() const { return workspace / "bovw"; }
    std::filesystem::path model_path() const { return workspace / "model.bin"; }
    std::filesystem::path predictions_path() const { return workspace / "predictions.csv"; }
    std::filesystem::path report_dir() const { return workspace / "report"; }
};

/// File stem used for one image's artifacts.
std::string feature_key(const ManifestRow& row);

/// 64-bit FNV-1a, hex encoded.
std::string content_hash(const std::string& bytes);

struct FeaturesSummary {
    std::size_t extracted = 0;
    std::size_t cached = 0;
    std::size_t failed = 0;
};

/// Color histograms and local descriptors for every manifest row. Images
/// whose inputs and settings are unchanged are skipped; unreadable images
/// produce a warning. Throws DataError when no image succeeds.
FeaturesSummary cmd_features(const Manifest& manifest, const PipelineContext& ctx);

/// Vocabulary from the descriptors of the training sequences.
void cmd_vocab(const Manifest& manifest, const PipelineContext& ctx);

/// BoVW histogram for every manifest row with features.
void cmd_encode(const Manifest& manifest, const PipelineContext& ctx);

/// Classifier from the training sequences.
void cmd_train(const Manifest& manifest, const PipelineContext& ctx);

/// Predictions for the test sequences: CSV `path,predicted,candidate,score`.
void cmd_predict(const Manifest& manifest, const PipelineContext& ctx);

/// Report on the test sequences from the predictions file.
EvalReport cmd_evaluate(const Manifest& manifest, const PipelineContext& ctx);

/// Composite feature of one row as configured.
CompositeFeature load_composite(const ManifestRow& row, const PipelineContext& ctx);

}  // namespace placeloc
