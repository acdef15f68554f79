#include "placeloc/model.hpp"

#include <fstream>

#include "placeloc/binary_io.hpp"
#include "placeloc/error.hpp"
#include "placeloc/eval.hpp"

namespace placeloc {

namespace {

constexpr char kMagic[5] = "PLCM";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxCount = 1u << 28;

void write_vector(std::ostream& out, const std::vector<double>& v) {
    io::write_le<std::uint64_t>(out, v.size());
    for (double x : v) io::write_le<double>(out, x);
}

std::vector<double> read_vector(std::istream& in) {
    const auto n = io::read_le<std::uint64_t>(in);
    if (n > kMaxCount) throw DataError("model vector too long");
    std::vector<double> v(n);
    for (auto& x : v) x = io::read_le<double>(in);
    return v;
}

std::uint64_t read_count(std::istream& in) {
    const auto n = io::read_le<std::uint64_t>(in);
    if (n > kMaxCount) throw DataError("model count implausible");
    return n;
}

void write_histogram(std::ostream& out, const FeatureHistogram& h) {
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(h.binning().kind));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(h.binning().axes.size()));
    for (int a : h.binning().axes) io::write_le<std::int32_t>(out, a);
    io::write_le<std::uint8_t>(out, h.normalized() ? 1 : 0);
    write_vector(out, h.vector());
}

FeatureHistogram read_histogram(std::istream& in) {
    const auto kind = io::read_le<std::uint8_t>(in);
    if (kind > static_cast<std::uint8_t>(Binning::Kind::Generic)) throw DataError("unknown binning kind in model");
    const auto n_axes = io::read_le<std::uint32_t>(in);
    if (n_axes > 8) throw DataError("too many binning axes in model");
    Binning b;
    b.kind = static_cast<Binning::Kind>(kind);
    for (std::uint32_t i = 0; i < n_axes; ++i) b.axes.push_back(io::read_le<std::int32_t>(in));
    const bool normalized = io::read_le<std::uint8_t>(in) != 0;
    return FeatureHistogram(b, read_vector(in), normalized);
}

}  // namespace

void check_config(const ClassifierModel& model, const std::string& config_id) {
    if (model.config_id != config_id) {
        throw DataError("model was trained on configuration '" + model.config_id + "' but features use '" +
                        config_id + "'");
    }
}

Prediction predict(const ClassifierModel& model, const CompositeFeature& feature) {
    const FeatureConfig config = model.config();
    Prediction p;
    if (model.kind == ClassifierModel::Kind::Svm) {
        const auto x = flatten(config, feature);
        const OvaPrediction o = ova_predict(model.svm, x);
        p.label = p.candidate = o.label;
        for (std::size_t c = 0; c < o.scores.size(); ++c) {
            if (model.svm.labels[c] == o.label) p.score = o.scores[c];
        }
        return p;
    }
    const NnResult r = nn_classify(config, feature, model.gallery, model.thresholds);
    p.label = r.label;
    p.candidate = r.candidate;
    p.score = -r.distance;
    return p;
}

void write_model(std::ostream& out, const ClassifierModel& model) {
    io::write_magic(out, kMagic);
    io::write_le<std::uint32_t>(out, kVersion);
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(model.kind));
    io::write_string(out, model.config_id);
    io::write_le<std::uint64_t>(out, model.parts.size());
    for (const auto& p : model.parts) {
        io::write_string(out, p.name);
        io::write_string(out, p.measure_id);
        io::write_le<double>(out, p.weight);
    }
    io::write_le<std::uint64_t>(out, model.labels.size());
    for (const auto& l : model.labels) io::write_string(out, l);

    if (model.kind == ClassifierModel::Kind::Svm) {
        if (model.svm.machines.size() != model.labels.size()) throw InvalidArgument("svm model inconsistent");
        for (const auto& m : model.svm.machines) {
            io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(m.kernel.kind));
            io::write_le<double>(out, m.kernel.c);
            io::write_le<double>(out, m.kernel.sigma);
            io::write_le<double>(out, m.bias);
            io::write_le<std::uint64_t>(out, m.support_vectors.size());
            for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
                io::write_le<double>(out, m.coefficients[i]);
                write_vector(out, m.support_vectors[i]);
            }
        }
        return;
    }
    for (const auto& l : model.labels) io::write_le<double>(out, model.thresholds.at(l));
    io::write_le<std::uint64_t>(out, model.gallery.size());
    for (const auto& g : model.gallery) {
        io::write_string(out, g.label);
        io::write_le<std::uint64_t>(out, g.feature.parts.size());
        for (const auto& h : g.feature.parts) write_histogram(out, h);
    }
}

ClassifierModel read_model(std::istream& in) {
    io::expect_magic(in, kMagic, "model");
    const auto version = io::read_le<std::uint32_t>(in);
    if (version != kVersion) throw DataError("unsupported model version " + std::to_string(version));
    ClassifierModel model;
    const auto kind = io::read_le<std::uint8_t>(in);
    if (kind > 1) throw DataError("unknown classifier kind in model");
    model.kind = static_cast<ClassifierModel::Kind>(kind);
    model.config_id = io::read_string(in);
    const auto n_parts = read_count(in);
    for (std::uint64_t i = 0; i < n_parts; ++i) {
        PartSpec p;
        p.name = io::read_string(in);
        p.measure_id = io::read_string(in);
        p.weight = io::read_le<double>(in);
        model.parts.push_back(std::move(p));
    }
    const auto n_labels = read_count(in);
    for (std::uint64_t i = 0; i < n_labels; ++i) model.labels.push_back(io::read_string(in));

    try {
        model.config();  // validates parts and weights
        if (model.kind == ClassifierModel::Kind::Svm) {
            model.svm.labels = model.labels;
            for (std::uint64_t c = 0; c < n_labels; ++c) {
                BinarySvm m;
                const auto k = io::read_le<std::uint8_t>(in);
                if (k > 2) throw DataError("unknown kernel kind in model");
                m.kernel.kind = static_cast<KernelSpec::Kind>(k);
                m.kernel.c = io::read_le<double>(in);
                m.kernel.sigma = io::read_le<double>(in);
                m.bias = io::read_le<double>(in);
                const auto n_sv = read_count(in);
                for (std::uint64_t i = 0; i < n_sv; ++i) {
                    m.coefficients.push_back(io::read_le<double>(in));
                    m.support_vectors.push_back(read_vector(in));
                }
                model.svm.machines.push_back(std::move(m));
            }
        } else {
            for (const auto& l : model.labels) model.thresholds[l] = io::read_le<double>(in);
            const auto n_gallery = read_count(in);
            for (std::uint64_t i = 0; i < n_gallery; ++i) {
                LabeledFeature g;
                g.label = io::read_string(in);
                const auto n = read_count(in);
                for (std::uint64_t j = 0; j < n; ++j) g.feature.parts.push_back(read_histogram(in));
                model.gallery.push_back(std::move(g));
            }
        }
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("invalid model file: ") + e.what());
    }
    return model;
}

void save_model(const std::filesystem::path& path, const ClassifierModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_model(out, model);
    if (!out) throw Error("write failed: " + path.string());
}

ClassifierModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_model(in);
}

}  // namespace placeloc
