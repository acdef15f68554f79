#include "placeloc/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "placeloc/error.hpp"

namespace placeloc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::logic_error&) {
    }
    throw InvalidArgument("config " + key + ": not a number: '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used == v.size()) return i;
    } catch (const std::logic_error&) {
    }
    throw InvalidArgument("config " + key + ": not an integer: '" + v + "'");
}

std::vector<int> int_list(const std::string& key, const std::string& v, char sep) {
    std::vector<int> out;
    for (const auto& cell : split(v, sep)) out.push_back(static_cast<int>(to_int(key, cell)));
    if (out.empty()) throw InvalidArgument("config " + key + ": empty list");
    return out;
}

std::string join_ints(const std::vector<int>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, trim(t.substr(eq + 1))).second) {
            throw InvalidArgument("config line " + std::to_string(lineno) + ": duplicate key " + key);
        }
    }
    return kv;
}

PipelineConfig PipelineConfig::from_key_values(const std::map<std::string, std::string>& kv) {
    PipelineConfig c;
    std::set<std::string> used;
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        used.insert(key);
        return &it->second;
    };

    if (auto v = get("features.parts")) {
        c.parts = split(*v, ',');
        for (const auto& p : c.parts) default_measure_for(p);  // validates the name
    }
    for (const auto& p : c.parts) {
        c.measures[p] = default_measure_for(p);
        c.weights[p] = 1.0 / static_cast<double>(c.parts.size());
    }
    for (const std::string p : {"rgb", "hsv", "bovw"}) {
        if (auto v = get("features." + p + ".measure")) c.measures[p] = *v;
        if (auto v = get("features." + p + ".weight")) c.weights[p] = to_double("features." + p + ".weight", *v);
    }
    if (auto v = get("features.rgb.bins")) c.rgb_bins = int_list("features.rgb.bins", *v, 'x');
    if (auto v = get("features.hsv.bins")) c.hsv_bins = int_list("features.hsv.bins", *v, 'x');
    if (c.rgb_bins.size() != 3 || c.hsv_bins.size() != 3) throw InvalidArgument("histogram bins need three axes");
    for (int b : c.rgb_bins) {
        if (b < 1) throw InvalidArgument("histogram bins must be >= 1");
    }
    for (int b : c.hsv_bins) {
        if (b < 1) throw InvalidArgument("histogram bins must be >= 1");
    }
    if (auto v = get("features.local")) {
        if (*v == "sift") c.local = LocalFeatureKind::Sift;
        else if (*v == "rgbsift") c.local = LocalFeatureKind::RgbSift;
        else if (*v == "asift") c.local = LocalFeatureKind::Asift;
        else throw InvalidArgument("features.local must be sift, rgbsift or asift");
    }
    if (auto v = get("sift.octaves")) c.sift.octaves = static_cast<int>(to_int("sift.octaves", *v));
    if (auto v = get("sift.scales")) c.sift.scales_per_octave = static_cast<int>(to_int("sift.scales", *v));
    if (auto v = get("sift.contrast_threshold")) c.sift.contrast_threshold = to_double("sift.contrast_threshold", *v);
    if (auto v = get("sift.edge_ratio")) c.sift.edge_ratio = to_double("sift.edge_ratio", *v);
    if (auto v = get("sift.orientation_sigma_factor")) {
        c.sift.orientation_sigma_factor = to_double("sift.orientation_sigma_factor", *v);
    }

    if (auto v = get("vocab.method")) {
        if (*v == "kmeans") c.vocab_method = VocabMethod::Kmeans;
        else if (*v == "incremental") c.vocab_method = VocabMethod::Incremental;
        else throw InvalidArgument("vocab.method must be kmeans or incremental");
    }
    if (auto v = get("vocab.k")) c.vocab_k = static_cast<int>(to_int("vocab.k", *v));
    if (auto v = get("vocab.distance")) c.vocab_distance = *v;
    if (auto v = get("vocab.threshold")) c.vocab_threshold = to_double("vocab.threshold", *v);
    if (auto v = get("vocab.max_iter")) c.vocab_max_iter = static_cast<int>(to_int("vocab.max_iter", *v));
    if (auto v = get("vocab.sample_cap")) {
        const auto cap = to_int("vocab.sample_cap", *v);
        if (cap < 1) throw InvalidArgument("vocab.sample_cap must be >= 1");
        c.vocab_sample_cap = static_cast<std::size_t>(cap);
    }
    if (c.vocab_k < 1) throw InvalidArgument("vocab.k must be >= 1");
    Measure::parse(c.vocab_distance);

    if (auto v = get("classifier.kind")) {
        if (*v != "svm" && *v != "nn") throw InvalidArgument("classifier.kind must be svm or nn");
        c.classifier = *v;
    }
    if (auto v = get("classifier.kernel")) c.kernel = KernelSpec::parse_kind(*v);
    if (auto v = get("classifier.C")) c.svm_c = to_double("classifier.C", *v);
    if (auto v = get("classifier.sigma")) c.rbf_sigma = *v == "auto" ? 0.0 : to_double("classifier.sigma", *v);
    if (auto v = get("classifier.linear_c")) c.linear_c = to_double("classifier.linear_c", *v);
    if (!(c.svm_c > 0.0)) throw InvalidArgument("classifier.C must be positive");
    if (!(c.rbf_sigma >= 0.0)) throw InvalidArgument("classifier.sigma must be positive or auto");
    if (auto v = get("ga.population")) c.ga.population = static_cast<int>(to_int("ga.population", *v));
    if (auto v = get("ga.mutation_rate")) c.ga.mutation_rate = to_double("ga.mutation_rate", *v);
    if (auto v = get("ga.crossover_rate")) c.ga.crossover_rate = to_double("ga.crossover_rate", *v);
    if (auto v = get("ga.generations")) c.ga.generations = static_cast<int>(to_int("ga.generations", *v));
    if (auto v = get("ga.elitism")) c.ga.elitism = static_cast<int>(to_int("ga.elitism", *v));

    if (auto v = get("split.train")) c.train_sequences = int_list("split.train", *v, ',');
    if (auto v = get("split.test")) c.test_sequences = int_list("split.test", *v, ',');
    if (auto v = get("pipeline.seed")) c.seed = static_cast<std::uint64_t>(to_int("pipeline.seed", *v));

    for (const auto& [key, value] : kv) {
        if (!used.count(key)) throw InvalidArgument("unknown config key " + key);
    }
    c.feature_config();  // validates measures and weights
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_key_values(parse_key_values(ss.str()));
}

FeatureConfig PipelineConfig::feature_config() const {
    std::vector<PartSpec> specs;
    for (const auto& p : parts) {
        const auto m = measures.find(p);
        const auto w = weights.find(p);
        specs.push_back({p, m == measures.end() ? default_measure_for(p) : m->second,
                         w == weights.end() ? 1.0 / static_cast<double>(parts.size()) : w->second});
    }
    return FeatureConfig(std::move(specs));
}

std::string PipelineConfig::config_id() const {
    std::string id = feature_config().id();
    for (const auto& p : parts) {
        if (p == "rgb") id += ";rgb=" + join_ints(rgb_bins, 'x');
        if (p == "hsv") id += ";hsv=" + join_ints(hsv_bins, 'x');
        if (p == "bovw") {
            id += ";bovw=" + std::string(vocab_method == VocabMethod::Kmeans ? "kmeans" : "incremental") + ":" +
                  std::to_string(vocab_k) + ":" + vocab_distance + ";local=" + extraction_id();
        }
    }
    return id;
}

std::string PipelineConfig::extraction_id() const {
    const char* kind = local == LocalFeatureKind::Sift ? "sift" : local == LocalFeatureKind::RgbSift ? "rgbsift" : "asift";
    return std::string(kind) + ":" + std::to_string(sift.octaves) + ":" + std::to_string(sift.scales_per_octave) +
           ":" + num(sift.contrast_threshold) + ":" + num(sift.edge_ratio) + ":" + num(sift.orientation_sigma_factor);
}

KernelSpec PipelineConfig::kernel_spec(double sigma) const {
    switch (kernel) {
        case KernelSpec::Kind::Linear: return KernelSpec::linear(linear_c);
        case KernelSpec::Kind::Rbf: return KernelSpec::rbf(sigma);
        case KernelSpec::Kind::Chi2: return KernelSpec::chi2();
    }
    return KernelSpec::rbf(sigma);
}

}  // namespace placeloc
