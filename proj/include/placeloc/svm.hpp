#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace placeloc {

struct KernelSpec {
    enum class Kind : std::uint8_t { Linear = 0, Rbf = 1, Chi2 = 2 };
    Kind kind = Kind::Rbf;
    double c = 0.0;      ///< linear offset
    double sigma = 1.0;  ///< rbf width

    static KernelSpec linear(double c = 0.0) { return {Kind::Linear, c, 1.0}; }
    static KernelSpec rbf(double sigma) { return {Kind::Rbf, 0.0, sigma}; }
    static KernelSpec chi2() { return {Kind::Chi2, 0.0, 1.0}; }
    /// "linear", "rbf" or "chi2".
    static Kind parse_kind(const std::string& name);
    std::string name() const;
};

/// linear: x.y + c; rbf: exp(-|x - y|^2 / (2 sigma^2));
/// chi2: 1 - sum (x_i - y_i)^2 / ((x_i + y_i) / 2), 0/0 terms := 0.
double kernel(std::span<const double> x, std::span<const double> y, const KernelSpec& spec);

/// Median Euclidean distance over pairs of a seeded subset of at most `cap`
/// points. Returns 1 when every pair coincides.
double median_pairwise_distance(const std::vector<std::vector<double>>& X, std::size_t cap = 1000,
                                std::uint64_t seed = 0);

struct SvmParams {
    double C = 10.0;
    double tolerance = 1e-3;
    long max_iterations = 10000000;
};

/// Two-class machine: decision(x) = sum coef_i K(sv_i, x) + bias, with
/// coef_i = alpha_i y_i.
struct BinarySvm {
    KernelSpec kernel;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coefficients;
    double bias = 0.0;
    long iterations = 0;

    double decision(std::span<const double> x) const;
};

/// SMO with second-order working-set selection. Labels must be +1 or -1 with
/// both present.
BinarySvm svm_train(const std::vector<std::vector<double>>& X, const std::vector<int>& y, const KernelSpec& spec,
                    const SvmParams& params = {});

/// One machine per class (class versus the rest); labels kept sorted.
struct OvaModel {
    std::vector<std::string> labels;
    std::vector<BinarySvm> machines;
};

struct OvaPrediction {
    std::string label;
    std::vector<double> scores;  ///< one per entry of OvaModel::labels
};

OvaModel ova_train(const std::vector<std::vector<double>>& X, const std::vector<std::string>& labels,
                   const KernelSpec& spec, const SvmParams& params = {}, unsigned jobs = 1);

/// Argmax of the pre-sign decision values; ties go to the lowest label.
OvaPrediction ova_predict(const OvaModel& model, std::span<const double> x);

}  // namespace placeloc
