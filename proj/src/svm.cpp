#include "placeloc/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "placeloc/error.hpp"
#include "placeloc/parallel.hpp"
#include "placeloc/rng.hpp"

namespace placeloc {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

KernelSpec::Kind KernelSpec::parse_kind(const std::string& name) {
    if (name == "linear") return Kind::Linear;
    if (name == "rbf") return Kind::Rbf;
    if (name == "chi2") return Kind::Chi2;
    throw InvalidArgument("unknown kernel '" + name + "' (expected linear, rbf or chi2)");
}

std::string KernelSpec::name() const {
    switch (kind) {
        case Kind::Linear: return "linear";
        case Kind::Rbf: return "rbf";
        case Kind::Chi2: return "chi2";
    }
    return "?";
}

double kernel(std::span<const double> x, std::span<const double> y, const KernelSpec& spec) {
    if (x.size() != y.size()) throw InvalidArgument("kernel inputs differ in dimension");
    switch (spec.kind) {
        case KernelSpec::Kind::Linear: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
            return dot + spec.c;
        }
        case KernelSpec::Kind::Rbf: {
            if (!(spec.sigma > 0.0)) throw InvalidArgument("rbf sigma must be positive");
            double d2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
            return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
        }
        case KernelSpec::Kind::Chi2: {
            double sum = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] < 0.0 || y[i] < 0.0) throw InvalidArgument("chi2 kernel needs non-negative inputs");
                const double s = x[i] + y[i];
                if (s > 0.0) sum += (x[i] - y[i]) * (x[i] - y[i]) / (0.5 * s);
            }
            return 1.0 - sum;
        }
    }
    throw InvalidArgument("unknown kernel kind");
}

double median_pairwise_distance(const std::vector<std::vector<double>>& X, std::size_t cap, std::uint64_t seed) {
    if (X.size() < 2) return 1.0;
    std::vector<std::size_t> idx(X.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (idx.size() > cap) {
        Rng rng(seed);
        for (std::size_t i = 0; i < cap; ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
        idx.resize(cap);
        std::sort(idx.begin(), idx.end());
    }
    std::vector<double> d;
    d.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            double s = 0.0;
            const auto& p = X[idx[a]];
            const auto& q = X[idx[b]];
            for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
            d.push_back(std::sqrt(s));
        }
    }
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid > 0.0 ? *mid : 1.0;
}

double BinarySvm::decision(std::span<const double> x) const {
    double s = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) s += coefficients[i] * placeloc::kernel(support_vectors[i], x, kernel);
    return s;
}

BinarySvm svm_train(const std::vector<std::vector<double>>& X, const std::vector<int>& y, const KernelSpec& spec,
                    const SvmParams& params) {
    const std::size_t n = X.size();
    if (n == 0 || y.size() != n) throw InvalidArgument("svm_train needs one label per example");
    if (!(params.C > 0.0)) throw InvalidArgument("C must be positive");
    bool pos = false;
    bool neg = false;
    for (int v : y) {
        if (v == 1) pos = true;
        else if (v == -1) neg = true;
        else throw InvalidArgument("svm labels must be +1 or -1");
    }
    if (!pos || !neg) throw InvalidArgument("svm_train needs examples of both classes");

    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) K[i * n + j] = K[j * n + i] = kernel(X[i], X[j], spec);
    }
    const double C = params.C;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> G(n, -1.0);  // gradient of 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    auto is_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0); };
    auto is_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C); };

    long iter = 0;
    for (; iter < params.max_iterations; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (is_up(t) && -y[t] * G[t] > gmax) {
                gmax = -y[t] * G[t];
                i = t;
            }
        }
        double gmin = std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!is_low(t)) continue;
            const double v = -y[t] * G[t];
            gmin = std::min(gmin, v);
            if (i == n) continue;
            const double b = gmax - v;
            if (b > 0.0) {
                double a = K[i * n + i] + K[t * n + t] - 2.0 * K[i * n + t];
                if (a <= 0.0) a = kTau;
                const double obj = -b * b / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if (i == n || j == n || gmax - gmin < params.tolerance) break;

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        const double qij = y[i] * y[j] * K[i * n + j];
        if (y[i] != y[j]) {
            double quad = K[i * n + i] + K[j * n + j] + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = K[i * n + i] + K[j * n + j] - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) {
            G[t] += y[t] * (y[i] * K[t * n + i] * dai + y[j] * K[t * n + j] * daj);
        }
    }

    // rho as in the usual SMO formulation; decision = sum a_i y_i K - rho.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * G[t];
        if (alpha[t] >= C) {
            if (y[t] == -1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] == 1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);

    BinarySvm model;
    model.kernel = spec;
    model.bias = -rho;
    model.iterations = iter;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_vectors.push_back(X[t]);
            model.coefficients.push_back(alpha[t] * y[t]);
        }
    }
    return model;
}

OvaModel ova_train(const std::vector<std::vector<double>>& X, const std::vector<std::string>& labels,
                   const KernelSpec& spec, const SvmParams& params, unsigned jobs) {
    if (X.size() != labels.size()) throw InvalidArgument("ova_train needs one label per example");
    const std::set<std::string> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw InvalidArgument("ova_train needs at least two classes");
    OvaModel model;
    model.labels.assign(distinct.begin(), distinct.end());
    model.machines.resize(model.labels.size());
    parallel_for(model.labels.size(), jobs, [&](std::size_t c) {
        std::vector<int> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == model.labels[c] ? 1 : -1;
        model.machines[c] = svm_train(X, y, spec, params);
    });
    return model;
}

OvaPrediction ova_predict(const OvaModel& model, std::span<const double> x) {
    if (model.machines.empty() || model.machines.size() != model.labels.size()) {
        throw InvalidArgument("one-vs-all model is empty or inconsistent");
    }
    OvaPrediction p;
    std::size_t best = 0;
    for (std::size_t c = 0; c < model.machines.size(); ++c) {
        p.scores.push_back(model.machines[c].decision(x));
        if (p.scores[c] > p.scores[best]) best = c;
    }
    p.label = model.labels[best];
    return p;
}

}  // namespace placeloc
