#include "placeloc/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "placeloc/asift.hpp"
#include "placeloc/bovw.hpp"
#include "placeloc/csv.hpp"
#include "placeloc/descriptor_io.hpp"
#include "placeloc/error.hpp"
#include "placeloc/histogram.hpp"
#include "placeloc/model.hpp"
#include "placeloc/parallel.hpp"
#include "placeloc/pnm.hpp"

namespace placeloc {

namespace {

std::optional<std::string> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

void log_line(const PipelineContext& ctx, const std::string& msg) {
    if (ctx.log) *ctx.log << msg << '\n';
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "x" : "") + std::to_string(v[i]);
    return out;
}

std::string extraction_settings(const PipelineConfig& c) {
    return c.extraction_id() + ";rgb=" + join_ints(c.rgb_bins) + ";hsv=" + join_ints(c.hsv_bins);
}


std::string fmt_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::filesystem::path part_path(const PipelineContext& ctx, const std::string& key, const std::string& part) {
    if (part == "bovw") return ctx.bovw_dir() / (key + ".csv");
    return ctx.features() / (key + "." + part + ".csv");
}

std::filesystem::path descriptor_path(const PipelineContext& ctx, const std::string& key) {
    return ctx.features() / (key + ".desc.bin");
}

std::vector<LocalFeature> extract_local(const Image& img, const PipelineConfig& c) {
    switch (c.local) {
        case LocalFeatureKind::Sift: return extract_sift(to_grayscale(img), c.sift);
        case LocalFeatureKind::RgbSift: return extract_rgb_sift(img, c.sift);
        case LocalFeatureKind::Asift: {
            AsiftParams p;
            p.sift = c.sift;
            return extract_asift(to_grayscale(img), p);
        }
    }
    return {};
}

DescriptorSet descriptor_values(const std::vector<LocalFeature>& features) {
    DescriptorSet out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(f.descriptor.values);
    return out;
}

// Loads composites for the given rows; rows whose features are missing are
// dropped with a warning.
std::vector<LabeledFeature> load_labeled(const Manifest& m, const PipelineContext& ctx,
                                         std::vector<std::size_t>* kept = nullptr) {
    std::vector<std::optional<LabeledFeature>> slots(m.rows.size());
    std::vector<std::string> errors(m.rows.size());
    parallel_for(m.rows.size(), ctx.jobs, [&](std::size_t i) {
        try {
            slots[i] = LabeledFeature{m.rows[i].label, load_composite(m.rows[i], ctx)};
        } catch (const DataError& e) {
            errors[i] = e.what();
        }
    });
    std::vector<LabeledFeature> out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i]) {
            log_line(ctx, "warning: skipping " + m.rows[i].path + ": " + errors[i]);
            continue;
        }
        out.push_back(std::move(*slots[i]));
        if (kept) kept->push_back(i);
    }
    return out;
}

}  // namespace

std::filesystem::path PipelineContext::features() const {
    return features_dir.empty() ? workspace / "features" : features_dir;
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string feature_key(const ManifestRow& row) {
    return std::filesystem::path(row.path).stem().string() + "_" + content_hash(row.path).substr(0, 8);
}

FeaturesSummary cmd_features(const Manifest& manifest, const PipelineContext& ctx) {
    if (manifest.rows.empty()) throw DataError("manifest has no images");
    std::filesystem::create_directories(ctx.features());
    const PipelineConfig& c = ctx.config;
    const std::string settings = extraction_settings(c);

    enum class Outcome { Extracted, Cached, Failed };
    std::vector<Outcome> outcome(manifest.rows.size(), Outcome::Failed);
    std::vector<std::string> errors(manifest.rows.size());
    parallel_for(manifest.rows.size(), ctx.jobs, [&](std::size_t i) {
        const ManifestRow& row = manifest.rows[i];
        const std::string key = feature_key(row);
        const auto bytes = read_bytes(manifest.resolve(row));
        if (!bytes) {
            errors[i] = "cannot read image";
            return;
        }
        const std::string stamp = "image=" + content_hash(*bytes) + "\nsettings=" + settings + "\n";
        const auto stamp_path = ctx.features() / (key + ".hash");
        const auto existing = read_bytes(stamp_path);
        if (existing && *existing == stamp && std::filesystem::exists(part_path(ctx, key, "rgb")) &&
            std::filesystem::exists(part_path(ctx, key, "hsv")) && std::filesystem::exists(descriptor_path(ctx, key))) {
            outcome[i] = Outcome::Cached;
            return;
        }
        Image img;
        try {
            img = decode_pnm(*bytes);
        } catch (const DataError& e) {
            errors[i] = e.what();
            return;
        }
        std::filesystem::remove(stamp_path);
        write_histogram_csv(part_path(ctx, key, "rgb"),
                            normalize_l1(rgb_histogram(img, c.rgb_bins[0], c.rgb_bins[1], c.rgb_bins[2])));
        write_histogram_csv(part_path(ctx, key, "hsv"),
                            normalize_l1(hsv_histogram(img, c.hsv_bins[0], c.hsv_bins[1], c.hsv_bins[2])));
        save_descriptors(descriptor_path(ctx, key), extract_local(img, c));
        write_text(stamp_path, stamp);
        outcome[i] = Outcome::Extracted;
    });

    FeaturesSummary s;
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        switch (outcome[i]) {
            case Outcome::Extracted: ++s.extracted; break;
            case Outcome::Cached: ++s.cached; break;
            case Outcome::Failed:
                ++s.failed;
                log_line(ctx, "warning: skipping " + manifest.rows[i].path + ": " + errors[i]);
                break;
        }
    }
    log_line(ctx, "features: " + std::to_string(s.extracted) + " extracted, " + std::to_string(s.cached) +
                      " up to date, " + std::to_string(s.failed) + " failed");
    if (s.extracted + s.cached == 0) throw DataError("no image could be processed");
    return s;
}

void cmd_vocab(const Manifest& manifest, const PipelineContext& ctx) {
    const PipelineConfig& c = ctx.config;
    const Manifest train = manifest.select(c.train_sequences);
    if (train.rows.empty()) throw DataError("no manifest rows in the training sequences");
    DescriptorSet all;
    for (const auto& row : train.rows) {
        const auto path = descriptor_path(ctx, feature_key(row));
        if (!std::filesystem::exists(path)) {
            log_line(ctx, "warning: no descriptors for " + row.path);
            continue;
        }
        for (auto& d : descriptor_values(load_descriptors(path))) all.push_back(std::move(d));
    }
    if (all.empty()) throw DataError("no local descriptors found for the training sequences");

    const auto start = std::chrono::steady_clock::now();
    const DescriptorSet sample = sample_descriptors(all, c.vocab_sample_cap, c.seed);
    std::optional<Vocabulary> vocab;
    if (c.vocab_method == PipelineConfig::VocabMethod::Kmeans) {
        KmeansParams p;
        p.k = c.vocab_k;
        p.distance_id = c.vocab_distance;
        p.seed = c.seed;
        p.max_iter = c.vocab_max_iter;
        p.jobs = ctx.jobs;
        KmeansTrace trace;
        vocab = kmeans(sample, p, &trace);
        log_line(ctx, "k-means: " + std::to_string(trace.iterations) + " iterations" +
                          (trace.converged ? " (converged)" : ""));
    } else {
        vocab = incremental_vocab(sample, c.vocab_threshold, c.vocab_distance);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::filesystem::create_directories(ctx.workspace);
    save_vocabulary(ctx.vocabulary_path(), *vocab);
    write_text(ctx.workspace / "vocab.csv", vocabulary_to_csv(*vocab));
    char buf[128];
    std::snprintf(buf, sizeof buf, "vocabulary: %zu words from %zu descriptors in %.2f s", vocab->size(),
                  sample.size(), seconds);
    log_line(ctx, buf);
}

void cmd_encode(const Manifest& manifest, const PipelineContext& ctx) {
    const Vocabulary vocab = load_vocabulary(ctx.vocabulary_path());
    std::filesystem::create_directories(ctx.bovw_dir());
    std::vector<std::string> notes(manifest.rows.size());
    parallel_for(manifest.rows.size(), ctx.jobs, [&](std::size_t i) {
        const ManifestRow& row = manifest.rows[i];
        const std::string key = feature_key(row);
        const auto path = descriptor_path(ctx, key);
        if (!std::filesystem::exists(path)) {
            notes[i] = "warning: no descriptors for " + row.path;
            return;
        }
        const DescriptorSet d = descriptor_values(load_descriptors(path));
        BowVector bow;
        if (d.empty()) {
            // No keypoints: fall back to the uninformative uniform histogram.
            notes[i] = "warning: " + row.path + " has no local features; using a uniform word histogram";
            bow = FeatureHistogram(Binning::bovw(static_cast<int>(vocab.size())),
                                   std::vector<double>(vocab.size(), 1.0 / static_cast<double>(vocab.size())), true);
        } else {
            bow = encode_image(d, vocab);
        }
        write_histogram_csv(part_path(ctx, key, "bovw"), bow);
    });
    for (const auto& n : notes) {
        if (!n.empty()) log_line(ctx, n);
    }
}

CompositeFeature load_composite(const ManifestRow& row, const PipelineContext& ctx) {
    const PipelineConfig& c = ctx.config;
    const std::string key = feature_key(row);
    CompositeFeature f;
    for (const auto& part : c.parts) {
        const auto path = part_path(ctx, key, part);
        if (!std::filesystem::exists(path)) throw DataError("missing " + part + " feature file " + path.string());
        if (part == "rgb") {
            auto h = read_histogram_csv(path, Binning::Kind::Rgb);
            if (h.binning().axes != c.rgb_bins) throw DataError("rgb histogram binning differs from the configuration");
            f.parts.push_back(std::move(h));
        } else if (part == "hsv") {
            auto h = read_histogram_csv(path, Binning::Kind::Hsv);
            if (h.binning().axes != c.hsv_bins) throw DataError("hsv histogram binning differs from the configuration");
            f.parts.push_back(std::move(h));
        } else {
            f.parts.push_back(read_histogram_csv(path, Binning::Kind::Bovw));
        }
    }
    return f;
}

void cmd_train(const Manifest& manifest, const PipelineContext& ctx) {
    const PipelineConfig& c = ctx.config;
    const Manifest train = manifest.select(c.train_sequences);
    std::vector<std::size_t> kept;
    std::vector<LabeledFeature> items = load_labeled(train, ctx, &kept);
    std::set<std::string> label_set;
    for (const auto& it : items) label_set.insert(it.label);
    if (label_set.size() < 2) throw DataError("training needs at least two classes with features");

    const FeatureConfig fc = c.feature_config();
    ClassifierModel model;
    model.config_id = c.config_id();
    model.parts = fc.parts();
    model.labels.assign(label_set.begin(), label_set.end());

    if (c.classifier == "svm") {
        model.kind = ClassifierModel::Kind::Svm;
        std::vector<std::vector<double>> X;
        std::vector<std::string> y;
        for (const auto& it : items) {
            X.push_back(flatten(fc, it.feature));
            y.push_back(it.label);
        }
        const double sigma = c.rbf_sigma > 0.0 ? c.rbf_sigma : median_pairwise_distance(X, 1000, c.seed);
        SvmParams sp;
        sp.C = c.svm_c;
        model.svm = ova_train(X, y, c.kernel_spec(sigma), sp, ctx.jobs);
        log_line(ctx, "svm: " + std::to_string(model.labels.size()) + " one-vs-all machines, kernel " +
                          model.svm.machines.front().kernel.name());
    } else {
        model.kind = ClassifierModel::Kind::Nn;
        // Validation for threshold tuning: the last training sequence, or
        // every third item when there is only one.
        int last_seq = train.rows[kept.front()].sequence;
        std::set<int> seqs;
        for (std::size_t i : kept) {
            seqs.insert(train.rows[i].sequence);
            last_seq = std::max(last_seq, train.rows[i].sequence);
        }
        std::vector<LabeledFeature> gallery;
        std::vector<LabeledFeature> validation;
        for (std::size_t j = 0; j < items.size(); ++j) {
            const bool held_out = seqs.size() > 1 ? train.rows[kept[j]].sequence == last_seq : j % 3 == 2;
            (held_out ? validation : gallery).push_back(items[j]);
        }
        if (gallery.empty() || validation.empty()) throw DataError("too few training images to tune thresholds");
        GaParams ga = c.ga;
        ga.seed = c.seed;
        ga.jobs = ctx.jobs;
        GaTrace trace;
        model.thresholds = ga_optimize_thresholds(fc, gallery, validation, ga, &trace);
        for (const auto& l : model.labels) model.thresholds.try_emplace(l, trace.upper_bound);
        model.gallery = std::move(items);
        log_line(ctx, "nn: thresholds tuned, validation F = " +
                          fmt_score(trace.best_fitness.empty() ? 0.0 : trace.best_fitness.back()));
    }
    std::filesystem::create_directories(ctx.workspace);
    save_model(ctx.model_path(), model);
}

void cmd_predict(const Manifest& manifest, const PipelineContext& ctx) {
    const ClassifierModel model = load_model(ctx.model_path());
    check_config(model, ctx.config.config_id());
    const Manifest test = manifest.select(ctx.config.test_sequences);
    if (test.rows.empty()) throw DataError("no manifest rows in the test sequences");
    std::vector<Prediction> preds(test.rows.size());
    std::vector<std::string> errors(test.rows.size());
    parallel_for(test.rows.size(), ctx.jobs, [&](std::size_t i) {
        try {
            preds[i] = predict(model, load_composite(test.rows[i], ctx));
        } catch (const DataError& e) {
            errors[i] = e.what();
            preds[i] = {kUnknownLabel, "", 0.0};
        }
    });
    std::string out = "path,predicted,candidate,score\n";
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!errors[i].empty()) log_line(ctx, "warning: " + test.rows[i].path + ": " + errors[i]);
        out += csv_field(test.rows[i].path) + "," + csv_field(preds[i].label) + "," + csv_field(preds[i].candidate) +
               "," + fmt_score(preds[i].score) + "\n";
    }
    std::filesystem::create_directories(ctx.workspace);
    write_text(ctx.predictions_path(), out);
}

EvalReport cmd_evaluate(const Manifest& manifest, const PipelineContext& ctx) {
    const auto text = read_bytes(ctx.predictions_path());
    if (!text) throw DataError("cannot read predictions " + ctx.predictions_path().string());
    std::istringstream in(*text);
    std::string line;
    if (!std::getline(in, line) || line != "path,predicted,candidate,score") {
        throw DataError("predictions file has an unexpected header");
    }
    std::map<std::string, std::pair<std::string, double>> by_path;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = parse_csv_line(line);
        if (cells.size() != 4) throw DataError("predictions row has " + std::to_string(cells.size()) + " fields");
        double score = 0.0;
        try {
            score = std::stod(cells[3]);
        } catch (const std::logic_error&) {
            throw DataError("predictions score is not a number: " + cells[3]);
        }
        by_path[cells[0]] = {cells[1], score};
    }

    const Manifest test = manifest.select(ctx.config.test_sequences);
    if (test.rows.empty()) throw DataError("no manifest rows in the test sequences");
    std::vector<std::string> predicted;
    std::vector<double> scores;
    std::vector<std::string> truths;
    for (const auto& row : test.rows) {
        const auto it = by_path.find(row.path);
        if (it == by_path.end()) {
            log_line(ctx, "warning: no prediction for " + row.path + "; counted as UNKNOWN");
            predicted.push_back(kUnknownLabel);
            scores.push_back(0.0);
        } else {
            predicted.push_back(it->second.first);
            scores.push_back(it->second.second);
        }
        truths.push_back(row.label);
    }
    const EvalReport report = evaluate(predicted, scores, truths, manifest.labels());
    write_report(report, ctx.report_dir());
    char buf[160];
    std::snprintf(buf, sizeof buf, "evaluate: %zu images, accuracy %.4f, P %.4f, R %.4f, F %.4f",
                  truths.size(), report.accuracy(), report.aggregate.metrics.precision,
                  report.aggregate.metrics.recall, report.aggregate.metrics.f_measure);
    log_line(ctx, buf);
    return report;
}

}  // namespace placeloc
