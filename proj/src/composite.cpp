#include "placeloc/composite.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "placeloc/error.hpp"

namespace placeloc {

namespace {

void check_shape(const FeatureConfig& config, const CompositeFeature& f) {
    if (f.parts.size() != config.size()) {
        throw InvalidArgument("feature has " + std::to_string(f.parts.size()) + " parts, configuration expects " +
                              std::to_string(config.size()));
    }
}

}  // namespace

FeatureConfig::FeatureConfig(std::vector<PartSpec> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw InvalidArgument("feature configuration needs at least one part");
    std::set<std::string> names;
    double total = 0.0;
    for (const auto& p : parts_) {
        if (p.name.empty()) throw InvalidArgument("feature part name is empty");
        if (!names.insert(p.name).second) throw InvalidArgument("duplicate feature part " + p.name);
        if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) throw InvalidArgument("part weights must be >= 0");
        total += p.weight;
        measures_.push_back(Measure::parse(p.measure_id));
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("part weights must sum to 1");
}

bool FeatureConfig::has(const std::string& name) const {
    for (const auto& p : parts_) {
        if (p.name == name) return true;
    }
    return false;
}

std::string FeatureConfig::id() const {
    std::string out;
    char buf[32];
    for (const auto& p : parts_) {
        if (!out.empty()) out += '+';
        std::snprintf(buf, sizeof buf, "%.6g", p.weight);
        out += p.name + ":" + p.measure_id + "@" + buf;
    }
    return out;
}

std::string default_measure_for(const std::string& part) {
    if (part == "rgb") return "jeffrey";
    if (part == "hsv") return "bhattacharyya";
    if (part == "bovw") return "minkowski:1";
    throw InvalidArgument("unknown feature part " + part);
}

double composite_distance(const FeatureConfig& config, const CompositeFeature& a, const CompositeFeature& b) {
    check_shape(config, a);
    check_shape(config, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double w = config.parts()[i].weight;
        if (w == 0.0) continue;
        if (a.parts[i].binning() != b.parts[i].binning()) {
            throw InvalidArgument("part " + config.parts()[i].name + " differs in binning");
        }
        sum += w * config.measure(i)(a.parts[i], b.parts[i]);
    }
    return sum;
}

std::vector<double> flatten(const FeatureConfig& config, const CompositeFeature& f) {
    check_shape(config, f);
    std::vector<double> out;
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double s = std::sqrt(config.parts()[i].weight);
        for (double v : f.parts[i].bins()) out.push_back(s * v);
    }
    return out;
}

}  // namespace placeloc
