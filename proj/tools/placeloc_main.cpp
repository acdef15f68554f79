// Command-line front end for the place recognition pipeline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "placeloc/error.hpp"
#include "placeloc/pipeline.hpp"
#include "placeloc/synth.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::string out = ".";
};

placeloc::PipelineContext make_context(const GlobalOptions& g, const std::string& features_dir) {
    placeloc::PipelineContext ctx;
    if (!g.config_path.empty()) ctx.config = placeloc::PipelineConfig::load(g.config_path);
    if (g.seed) ctx.config.seed = *g.seed;
    ctx.workspace = g.out;
    ctx.features_dir = features_dir;
    ctx.jobs = g.jobs;
    ctx.log = &std::cerr;
    return ctx;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological place recognition from color histograms and bags of visual words"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "Pipeline configuration (section.key = value)");
    app.add_option("--seed", g.seed, "Seed for sampling, clustering and tuning");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
    app.add_option("--out", g.out, "Output directory (workspace)");

    std::string manifest_path;
    std::string features_dir;
    auto add_stage = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--manifest", manifest_path, "Dataset manifest (path<TAB>label<TAB>sequence)")
            ->required();
        sub->add_option("--features-dir", features_dir, "Per-image feature directory (default <out>/features)");
        return sub;
    };
    auto* features = add_stage("features", "Extract color histograms and local descriptors");
    auto* vocab = add_stage("vocab", "Build the visual vocabulary from the training sequences");
    auto* encode = add_stage("encode", "Encode every image as a bag of visual words");
    auto* train = add_stage("train", "Train the classifier on the training sequences");
    auto* predict = add_stage("predict", "Predict labels for the test sequences");
    auto* evaluate = add_stage("evaluate", "Write the evaluation report for the test sequences");
    auto* run = add_stage("run", "features, vocab, encode, train, predict and evaluate in one go");

    placeloc::SynthSpec synth;
    auto* synth_cmd = app.add_subcommand("synth-dataset", "Generate the synthetic room dataset");
    synth_cmd->add_option("--classes", synth.classes, "Number of classes (1-9)")->check(CLI::Range(1, 9));
    synth_cmd->add_option("--sequences", synth.sequences, "Capture sequences per class")->check(CLI::Range(1, 100));
    synth_cmd->add_option("--per-sequence", synth.per_sequence, "Images per class and sequence")
        ->check(CLI::Range(1, 100000));
    synth_cmd->add_option("--size", synth.size, "Image side length in pixels")->check(CLI::Range(16, 4096));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (synth_cmd->parsed()) {
            synth.seed = g.seed.value_or(0);
            const auto m = placeloc::write_synthetic_dataset(g.out, synth);
            std::cerr << "synth-dataset: " << m.rows.size() << " images, manifest "
                      << (std::filesystem::path(g.out) / "manifest.tsv").string() << '\n';
            return kOk;
        }
        const placeloc::PipelineContext ctx = make_context(g, features_dir);
        const placeloc::Manifest manifest = placeloc::load_manifest(manifest_path);
        const bool needs_bovw = ctx.config.feature_config().has("bovw");
        if (features->parsed() || run->parsed()) placeloc::cmd_features(manifest, ctx);
        if (vocab->parsed() || (run->parsed() && needs_bovw)) placeloc::cmd_vocab(manifest, ctx);
        if (encode->parsed() || (run->parsed() && needs_bovw)) placeloc::cmd_encode(manifest, ctx);
        if (train->parsed() || run->parsed()) placeloc::cmd_train(manifest, ctx);
        if (predict->parsed() || run->parsed()) placeloc::cmd_predict(manifest, ctx);
        if (evaluate->parsed() || run->parsed()) placeloc::cmd_evaluate(manifest, ctx);
        return kOk;
    } catch (const placeloc::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const placeloc::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
