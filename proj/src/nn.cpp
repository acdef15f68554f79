#include "placeloc/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "placeloc/error.hpp"
#include "placeloc/eval.hpp"
#include "placeloc/parallel.hpp"
#include "placeloc/rng.hpp"

namespace placeloc {

namespace {

double threshold_of(const ThresholdSet& t, const std::string& label) {
    const auto it = t.find(label);
    if (it == t.end()) throw InvalidArgument("no threshold for class " + label);
    return it->second;
}

ThresholdSet thresholds_of(const std::vector<double>& genome, const std::vector<std::string>& labels) {
    ThresholdSet t;
    for (std::size_t i = 0; i < labels.size(); ++i) t[labels[i]] = genome[i];
    return t;
}

// Rank selection: the individual at rank r (0 = best) of n is drawn with
// weight n - r.
std::size_t select_rank(std::size_t n, Rng& rng) {
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n + 1);
    double target = rng.uniform() * total;
    for (std::size_t r = 0; r < n; ++r) {
        target -= static_cast<double>(n - r);
        if (target < 0.0) return r;
    }
    return n - 1;
}

}  // namespace

ThresholdSet permissive_thresholds(const std::vector<std::string>& labels) {
    ThresholdSet t;
    for (const auto& l : labels) t[l] = std::numeric_limits<double>::max();
    return t;
}

ThresholdSet strict_thresholds(const std::vector<std::string>& labels) {
    ThresholdSet t;
    for (const auto& l : labels) t[l] = std::numeric_limits<double>::lowest();
    return t;
}

NnResult nearest_neighbor(const FeatureConfig& config, const CompositeFeature& query,
                          const std::vector<LabeledFeature>& gallery) {
    if (gallery.empty()) throw InvalidArgument("nearest-neighbor gallery is empty");
    NnResult best;
    best.distance = std::numeric_limits<double>::infinity();
    bool first = true;
    for (const auto& item : gallery) {
        const double d = composite_distance(config, query, item.feature);
        if (first || d < best.distance || (d == best.distance && item.label < best.candidate)) {
            best.distance = d;
            best.candidate = item.label;
            first = false;
        }
    }
    best.label = best.candidate;
    return best;
}

NnResult nn_classify(const FeatureConfig& config, const CompositeFeature& query,
                     const std::vector<LabeledFeature>& gallery, const ThresholdSet& thresholds) {
    NnResult r = nearest_neighbor(config, query, gallery);
    if (!(r.distance <= threshold_of(thresholds, r.candidate))) r.label = kUnknownLabel;
    return r;
}

double threshold_fitness(const std::vector<NnObservation>& observations, const ThresholdSet& thresholds) {
    std::size_t correct = 0;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;  // items of a known class; unseen rooms are only ever wrong when accepted
    for (const auto& o : observations) {
        if (thresholds.count(o.truth)) ++relevant;
        if (!(o.distance <= threshold_of(thresholds, o.candidate))) continue;
        ++retrieved;
        if (o.candidate == o.truth) ++correct;
    }
    return metrics(correct, retrieved, relevant).f_measure;
}

ThresholdSet ga_optimize_thresholds(const std::vector<NnObservation>& observations,
                                    const std::vector<std::string>& labels, const GaParams& params,
                                    GaTrace* trace) {
    if (observations.empty()) throw InvalidArgument("GA needs a non-empty validation set");
    if (labels.empty()) throw InvalidArgument("GA needs at least one class");
    if (params.population < 2 || params.generations < 0 || params.elitism < 0 ||
        params.elitism > params.population) {
        throw InvalidArgument("invalid GA population settings");
    }
    const std::set<std::string> known(labels.begin(), labels.end());
    double upper = 0.0;
    for (const auto& o : observations) {
        if (!known.count(o.candidate)) throw InvalidArgument("observation names an unknown class " + o.candidate);
        if (std::isfinite(o.distance)) upper = std::max(upper, o.distance);
    }
    if (upper <= 0.0) upper = 1.0;

    const auto pop_size = static_cast<std::size_t>(params.population);
    const std::size_t genes = labels.size();
    const double sigma = params.mutation_scale * upper;
    Rng rng(params.seed);

    std::vector<std::vector<double>> pop(pop_size, std::vector<double>(genes));
    for (auto& ind : pop) {
        for (auto& g : ind) g = rng.uniform(0.0, upper);
    }
    std::vector<double> fitness(pop_size);
    auto evaluate = [&] {
        parallel_for(pop_size, params.jobs,
                     [&](std::size_t i) { fitness[i] = threshold_fitness(observations, thresholds_of(pop[i], labels)); });
    };
    auto ranking = [&] {
        std::vector<std::size_t> order(pop_size);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fitness[a] > fitness[b]; });
        return order;
    };

    GaTrace local;
    GaTrace& tr = trace ? *trace : local;
    tr = {};
    tr.upper_bound = upper;

    evaluate();
    auto order = ranking();
    for (int gen = 0; gen < params.generations; ++gen) {
        std::vector<std::vector<double>> next;
        next.reserve(pop_size);
        for (int e = 0; e < params.elitism; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);
        while (next.size() < pop_size) {
            const auto& a = pop[order[select_rank(pop_size, rng)]];
            const auto& b = pop[order[select_rank(pop_size, rng)]];
            std::vector<double> child = a;
            if (rng.uniform() < params.crossover_rate) {
                for (std::size_t g = 0; g < genes; ++g) {
                    const double mix = rng.uniform();
                    child[g] = mix * a[g] + (1.0 - mix) * b[g];
                }
            }
            for (auto& g : child) {
                if (rng.uniform() < params.mutation_rate) g = std::clamp(g + sigma * rng.normal(), 0.0, upper);
            }
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        evaluate();
        order = ranking();
        tr.best_fitness.push_back(fitness[order[0]]);
    }
    return thresholds_of(pop[order[0]], labels);
}

ThresholdSet ga_optimize_thresholds(const FeatureConfig& config, const std::vector<LabeledFeature>& train,
                                    const std::vector<LabeledFeature>& validation, const GaParams& params,
                                    GaTrace* trace) {
    if (train.empty() || validation.empty()) throw InvalidArgument("GA needs non-empty train and validation sets");
    std::set<std::string> labels;
    for (const auto& t : train) labels.insert(t.label);
    std::vector<NnObservation> obs(validation.size());
    parallel_for(validation.size(), params.jobs, [&](std::size_t i) {
        const NnResult r = nearest_neighbor(config, validation[i].feature, train);
        obs[i] = {validation[i].label, r.candidate, r.distance};
    });
    return ga_optimize_thresholds(obs, std::vector<std::string>(labels.begin(), labels.end()), params, trace);
}

}  // namespace placeloc
