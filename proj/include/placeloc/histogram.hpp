#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "placeloc/image.hpp"

namespace placeloc {

/// What the bins of a FeatureHistogram index.
struct Binning {
    enum class Kind { Rgb, Hsv, Bovw, Generic };

    Kind kind = Kind::Generic;
    std::vector<int> axes;  ///< per-axis bin counts; bin count is their product

    std::size_t bin_count() const;
    /// "10x10x10", "100", ...
    std::string axes_string() const;
    /// "rgb:10x10x10", "hsv:18x10x10", "bovw:100", "generic:n".
    std::string describe() const;

    static Binning rgb(int nr, int ng, int nb) { return {Kind::Rgb, {nr, ng, nb}}; }
    static Binning hsv(int nh, int ns, int nv) { return {Kind::Hsv, {nh, ns, nv}}; }
    static Binning bovw(int k) { return {Kind::Bovw, {k}}; }
    static Binning generic(int n) { return {Kind::Generic, {n}}; }

    friend bool operator==(const Binning&, const Binning&) = default;
};

/// Non-negative bin vector plus its binning metadata.
class FeatureHistogram {
public:
    FeatureHistogram() = default;
    FeatureHistogram(Binning binning, std::vector<double> bins, bool normalized = false);

    const Binning& binning() const { return binning_; }
    std::span<const double> bins() const { return bins_; }
    const std::vector<double>& vector() const { return bins_; }
    std::size_t size() const { return bins_.size(); }
    bool normalized() const { return normalized_; }
    double total() const;

    double operator[](std::size_t i) const { return bins_[i]; }

private:
    Binning binning_;
    std::vector<double> bins_;
    bool normalized_ = false;
};

inline constexpr int kDefaultRgbBins = 10;
inline constexpr int kDefaultHueBins = 18;
inline constexpr int kDefaultSatBins = 10;
inline constexpr int kDefaultValBins = 10;

/// Joint RGB histogram flattened as t = r_bin + n_r*g_bin + n_r*n_g*b_bin.
/// Unnormalized: bins sum to the pixel count.
FeatureHistogram rgb_histogram(const Image& img, int n_r = kDefaultRgbBins, int n_g = kDefaultRgbBins,
                               int n_b = kDefaultRgbBins);

/// Joint HSV histogram (hue over [0,360), s and v over [0,1]) with the same
/// flattening as rgb_histogram.
FeatureHistogram hsv_histogram(const Image& img, int n_h = kDefaultHueBins, int n_s = kDefaultSatBins,
                               int n_v = kDefaultValBins);

/// Bin index of value in [0, range] split into n half-open bins, top clamped.
int quantize_axis(double value, double range, int n);

FeatureHistogram normalize_l1(const FeatureHistogram& h);

/// Running sum over the bins in flattened order.
FeatureHistogram cumulative(const FeatureHistogram& h);

/// CSV: header `axes=<a>x<b>x<c>,normalized=<0|1>` then one bin per line,
/// printed with 17 significant digits. The kind is not stored; reading
/// yields the kind passed by the caller.
std::string histogram_to_csv(const FeatureHistogram& h);
FeatureHistogram histogram_from_csv(const std::string& text, Binning::Kind kind = Binning::Kind::Generic);
void write_histogram_csv(const std::filesystem::path& path, const FeatureHistogram& h);
FeatureHistogram read_histogram_csv(const std::filesystem::path& path,
                                    Binning::Kind kind = Binning::Kind::Generic);

}  // namespace placeloc
