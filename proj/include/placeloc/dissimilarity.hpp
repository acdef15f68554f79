#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "placeloc/emd.hpp"
#include "placeloc/histogram.hpp"

namespace placeloc {

/// Returned by bhattacharyya() for histograms with disjoint support.
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::max();

inline constexpr double kDefaultKlEpsilon = 1e-10;

/// (sum |h_i - k_i|^r)^(1/r), r >= 1.
double minkowski(std::span<const double> h, std::span<const double> k, double r);

enum class KlForm {
    Standard,  ///< sum h_i log(h_i / max(k_i, eps))
    Printed,   ///< sum log(h_i / max(k_i, eps)) over h_i > 0
};

/// Requires both inputs L1-normalized.
double kullback_leibler(std::span<const double> h, std::span<const double> k, double epsilon = kDefaultKlEpsilon,
                        KlForm form = KlForm::Standard);

/// Symmetric divergence against the mean histogram; 0 log 0 := 0.
double jeffrey(std::span<const double> h, std::span<const double> k);

/// sum (h_i - k_i)^2 / h_i over bins with h_i > 0. With `symmetric`, the
/// denominator is (h_i + k_i) / 2 and 0/0 terms vanish.
double chi_square(std::span<const double> h, std::span<const double> k, bool symmetric = false);

/// -ln sum sqrt(h_i k_i); requires L1-normalized inputs. Disjoint supports
/// give kInfiniteDistance.
double bhattacharyya(std::span<const double> h, std::span<const double> k);

/// L1 distance between cumulative histograms; masses must agree.
double match_distance(std::span<const double> h, std::span<const double> k);

/// A dissimilarity selected by string id:
/// euclidean | minkowski:<r> | kl | jeffrey | chi2 | chi2sym | bhattacharyya | emd | match
class Measure {
public:
    enum class Kind { Minkowski, KullbackLeibler, Jeffrey, ChiSquare, ChiSquareSym, Bhattacharyya, Emd, Match };

    static Measure parse(std::string_view id);
    static Measure euclidean() { return parse("euclidean"); }

    Kind kind() const { return kind_; }
    double order() const { return r_; }
    const std::string& id() const { return id_; }
    bool symmetric() const { return kind_ != Kind::KullbackLeibler && kind_ != Kind::ChiSquare; }

    /// Replaces the default |i - j| ground distance used by emd.
    Measure with_ground(std::shared_ptr<const GroundDistanceMatrix> ground) const;

    double operator()(std::span<const double> h, std::span<const double> k) const;
    double operator()(const FeatureHistogram& h, const FeatureHistogram& k) const {
        return (*this)(h.bins(), k.bins());
    }

private:
    Kind kind_ = Kind::Minkowski;
    double r_ = 2.0;
    std::string id_ = "euclidean";
    std::shared_ptr<const GroundDistanceMatrix> ground_;
};

}  // namespace placeloc
