#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "placeloc/histogram.hpp"

namespace placeloc {

/// Symmetric n x n bin-to-bin cost matrix with a zero diagonal.
class GroundDistanceMatrix {
public:
    GroundDistanceMatrix() = default;
    GroundDistanceMatrix(std::size_t n, std::vector<double> values);

    /// d_ij = |i - j|.
    static GroundDistanceMatrix linear(std::size_t n);
    /// Euclidean distance between normalized bin-center coordinates; the
    /// hue axis of an HSV binning wraps around.
    static GroundDistanceMatrix for_binning(const Binning& binning);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

/// Dense n x n flow, row = source bin of H, column = target bin of K.
class FlowMatrix {
public:
    FlowMatrix() = default;
    explicit FlowMatrix(std::size_t n) : n_(n), f_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return f_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return f_[i * n_ + j]; }
    double total() const;

private:
    std::size_t n_ = 0;
    std::vector<double> f_;
};

struct EmdResult {
    double distance = 0.0;    ///< optimal work divided by total flow
    double work = 0.0;        ///< sum d_ij f_ij
    double total_flow = 0.0;  ///< min(sum H, sum K)
    FlowMatrix flow;
};

/// Earth mover's distance between two non-negative histograms of equal
/// length. Unequal masses are matched partially: total flow is the smaller
/// mass. Solved with the transportation simplex (north-west corner start,
/// MODI pricing).
EmdResult emd(std::span<const double> h, std::span<const double> k, const GroundDistanceMatrix& ground);

}  // namespace placeloc
