#include "placeloc/dissimilarity.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "placeloc/error.hpp"

namespace placeloc {

namespace {

void check_lengths(std::span<const double> h, std::span<const double> k) {
    if (h.size() != k.size()) {
        throw InvalidArgument("histogram length mismatch: " + std::to_string(h.size()) + " vs " +
                              std::to_string(k.size()));
    }
}

void check_normalized(std::span<const double> v, const char* who) {
    double sum = 0.0;
    for (double x : v) {
        if (x < 0.0) throw InvalidArgument(std::string(who) + ": negative bin");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw InvalidArgument(std::string(who) + ": input must be L1-normalized (sum is " + std::to_string(sum) + ")");
    }
}

// x log(x / y) with 0 log(...) := 0.
double xlogx_over(double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; }

}  // namespace

double minkowski(std::span<const double> h, std::span<const double> k, double r) {
    check_lengths(h, k);
    if (!(r >= 1.0)) throw InvalidArgument("minkowski order must be >= 1");
    double sum = 0.0;
    if (r == 1.0) {
        for (std::size_t i = 0; i < h.size(); ++i) sum += std::abs(h[i] - k[i]);
        return sum;
    }
    if (r == 2.0) {
        for (std::size_t i = 0; i < h.size(); ++i) sum += (h[i] - k[i]) * (h[i] - k[i]);
        return std::sqrt(sum);
    }
    for (std::size_t i = 0; i < h.size(); ++i) sum += std::pow(std::abs(h[i] - k[i]), r);
    return std::pow(sum, 1.0 / r);
}

double kullback_leibler(std::span<const double> h, std::span<const double> k, double epsilon, KlForm form) {
    check_lengths(h, k);
    check_normalized(h, "kullback_leibler");
    check_normalized(k, "kullback_leibler");
    if (!(epsilon > 0.0)) throw InvalidArgument("kullback_leibler epsilon must be positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] <= 0.0) continue;
        const double ratio = h[i] / std::max(k[i], epsilon);
        sum += form == KlForm::Standard ? h[i] * std::log(ratio) : std::log(ratio);
    }
    return sum;
}

double jeffrey(std::span<const double> h, std::span<const double> k) {
    check_lengths(h, k);
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double mean2 = h[i] + k[i];
        if (mean2 <= 0.0) continue;
        sum += xlogx_over(h[i], mean2 / 2.0) + xlogx_over(k[i], mean2 / 2.0);
    }
    return std::max(sum, 0.0);
}

double chi_square(std::span<const double> h, std::span<const double> k, bool symmetric) {
    check_lengths(h, k);
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double diff = h[i] - k[i];
        const double denom = symmetric ? 0.5 * (h[i] + k[i]) : h[i];
        if (denom > 0.0) sum += diff * diff / denom;
    }
    return sum;
}

double bhattacharyya(std::span<const double> h, std::span<const double> k) {
    check_lengths(h, k);
    check_normalized(h, "bhattacharyya");
    check_normalized(k, "bhattacharyya");
    double coefficient = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) coefficient += std::sqrt(h[i] * k[i]);
    if (coefficient <= 0.0) return kInfiniteDistance;
    return std::max(0.0, -std::log(coefficient));
}

double match_distance(std::span<const double> h, std::span<const double> k) {
    check_lengths(h, k);
    double mass_h = 0.0;
    double mass_k = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        mass_h += h[i];
        mass_k += k[i];
    }
    if (std::abs(mass_h - mass_k) > 1e-9 * std::max(1.0, std::max(mass_h, mass_k))) {
        throw InvalidArgument("match_distance needs equal masses");
    }
    double cum_h = 0.0;
    double cum_k = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        cum_h += h[i];
        cum_k += k[i];
        sum += std::abs(cum_h - cum_k);
    }
    return sum;
}

Measure Measure::parse(std::string_view id) {
    static const std::map<std::string_view, Kind, std::less<>> simple = {
        {"kl", Kind::KullbackLeibler}, {"jeffrey", Kind::Jeffrey},
        {"chi2", Kind::ChiSquare},     {"chi2sym", Kind::ChiSquareSym},
        {"bhattacharyya", Kind::Bhattacharyya}, {"emd", Kind::Emd},
        {"match", Kind::Match},
    };
    Measure m;
    m.id_ = std::string(id);
    if (id == "euclidean") {
        m.kind_ = Kind::Minkowski;
        m.r_ = 2.0;
        return m;
    }
    if (id.rfind("minkowski:", 0) == 0) {
        const auto arg = id.substr(10);
        double r = 0.0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), r);
        if (ec != std::errc() || ptr != arg.data() + arg.size() || !(r >= 1.0) || !std::isfinite(r)) {
            throw InvalidArgument("bad minkowski order in measure id '" + std::string(id) + "'");
        }
        m.kind_ = Kind::Minkowski;
        m.r_ = r;
        return m;
    }
    const auto it = simple.find(id);
    if (it == simple.end()) throw InvalidArgument("unknown measure id '" + std::string(id) + "'");
    m.kind_ = it->second;
    return m;
}

Measure Measure::with_ground(std::shared_ptr<const GroundDistanceMatrix> ground) const {
    Measure m = *this;
    m.ground_ = std::move(ground);
    return m;
}

double Measure::operator()(std::span<const double> h, std::span<const double> k) const {
    switch (kind_) {
        case Kind::Minkowski: return minkowski(h, k, r_);
        case Kind::KullbackLeibler: return kullback_leibler(h, k);
        case Kind::Jeffrey: return jeffrey(h, k);
        case Kind::ChiSquare: return chi_square(h, k, false);
        case Kind::ChiSquareSym: return chi_square(h, k, true);
        case Kind::Bhattacharyya: return bhattacharyya(h, k);
        case Kind::Match: return match_distance(h, k);
        case Kind::Emd:
            if (ground_) return emd(h, k, *ground_).distance;
            return emd(h, k, GroundDistanceMatrix::linear(h.size())).distance;
    }
    throw InvalidArgument("unhandled measure kind");
}

}  // namespace placeloc
