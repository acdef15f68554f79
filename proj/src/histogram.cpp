#include "placeloc/histogram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "placeloc/error.hpp"

namespace placeloc {

namespace {

void check_axes(std::initializer_list<int> axes) {
    for (int n : axes) {
        if (n < 1) throw InvalidArgument("histogram axis must have at least one bin");
    }
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what) {
    // std::from_chars for double is available in libstdc++ 11.
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw DataError(std::string("cannot parse ") + what + ": '" + s + "'");
    return v;
}

}  // namespace

std::size_t Binning::bin_count() const {
    std::size_t n = 1;
    for (int a : axes) n *= static_cast<std::size_t>(a);
    return axes.empty() ? 0 : n;
}

std::string Binning::axes_string() const {
    std::string s;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(axes[i]);
    }
    return s;
}

std::string Binning::describe() const {
    switch (kind) {
        case Kind::Rgb: return "rgb:" + axes_string();
        case Kind::Hsv: return "hsv:" + axes_string();
        case Kind::Bovw: return "bovw:" + axes_string();
        case Kind::Generic: break;
    }
    return "generic:" + std::to_string(bin_count());
}

FeatureHistogram::FeatureHistogram(Binning binning, std::vector<double> bins, bool normalized)
    : binning_(std::move(binning)), bins_(std::move(bins)), normalized_(normalized) {
    if (binning_.bin_count() != bins_.size()) {
        throw InvalidArgument("histogram has " + std::to_string(bins_.size()) + " bins but binning " +
                              binning_.describe() + " needs " + std::to_string(binning_.bin_count()));
    }
    for (double b : bins_) {
        if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("histogram bins must be finite and >= 0");
    }
    if (normalized_ && std::abs(total() - 1.0) > 1e-9) {
        throw InvalidArgument("histogram flagged normalized but sums to " + format_g17(total()));
    }
}

double FeatureHistogram::total() const {
    double s = 0.0;
    for (double b : bins_) s += b;
    return s;
}

int quantize_axis(double value, double range, int n) {
    const int bin = static_cast<int>(std::floor(value / range * n));
    return std::clamp(bin, 0, n - 1);
}

FeatureHistogram rgb_histogram(const Image& img, int n_r, int n_g, int n_b) {
    check_axes({n_r, n_g, n_b});
    auto binning = Binning::rgb(n_r, n_g, n_b);
    std::vector<double> bins(binning.bin_count(), 0.0);
    for (const auto& p : img.pixels()) {
        const std::size_t t = static_cast<std::size_t>(quantize_axis(p.r, 1.0, n_r)) +
                              static_cast<std::size_t>(n_r) * quantize_axis(p.g, 1.0, n_g) +
                              static_cast<std::size_t>(n_r) * n_g * quantize_axis(p.b, 1.0, n_b);
        bins[t] += 1.0;
    }
    return {std::move(binning), std::move(bins)};
}

FeatureHistogram hsv_histogram(const Image& img, int n_h, int n_s, int n_v) {
    check_axes({n_h, n_s, n_v});
    auto binning = Binning::hsv(n_h, n_s, n_v);
    std::vector<double> bins(binning.bin_count(), 0.0);
    for (const auto& p : img.pixels()) {
        const auto hsv = rgb_to_hsv(p.r, p.g, p.b);
        const std::size_t t = static_cast<std::size_t>(quantize_axis(hsv.h, 360.0, n_h)) +
                              static_cast<std::size_t>(n_h) * quantize_axis(hsv.s, 1.0, n_s) +
                              static_cast<std::size_t>(n_h) * n_s * quantize_axis(hsv.v, 1.0, n_v);
        bins[t] += 1.0;
    }
    return {std::move(binning), std::move(bins)};
}

FeatureHistogram normalize_l1(const FeatureHistogram& h) {
    const double sum = h.total();
    if (!(sum > 0.0)) throw InvalidArgument("cannot L1-normalize an all-zero histogram");
    std::vector<double> bins(h.bins().begin(), h.bins().end());
    for (auto& b : bins) b /= sum;
    return {h.binning(), std::move(bins), true};
}

FeatureHistogram cumulative(const FeatureHistogram& h) {
    std::vector<double> out(h.size());
    double run = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        run += h[i];
        out[i] = run;
    }
    return {h.binning(), std::move(out)};
}

std::string histogram_to_csv(const FeatureHistogram& h) {
    std::string out = "axes=" + h.binning().axes_string() + ",normalized=" + (h.normalized() ? "1" : "0") + "\n";
    for (double b : h.bins()) {
        out += format_g17(b);
        out += '\n';
    }
    return out;
}

FeatureHistogram histogram_from_csv(const std::string& text, Binning::Kind kind) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw DataError("histogram csv: empty input");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto comma = header.find(",normalized=");
    if (header.rfind("axes=", 0) != 0 || comma == std::string::npos) {
        throw DataError("histogram csv: bad header '" + header + "'");
    }
    Binning binning{kind, {}};
    std::string axes = header.substr(5, comma - 5);
    std::size_t start = 0;
    while (true) {
        const auto x = axes.find('x', start);
        const std::string tok = axes.substr(start, x == std::string::npos ? std::string::npos : x - start);
        int n = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || n < 1) {
            throw DataError("histogram csv: bad axes '" + axes + "'");
        }
        binning.axes.push_back(n);
        if (x == std::string::npos) break;
        start = x + 1;
    }
    const std::string flag = header.substr(comma + 12);
    if (flag != "0" && flag != "1") throw DataError("histogram csv: bad normalized flag '" + flag + "'");

    std::vector<double> bins;
    bins.reserve(binning.bin_count());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        bins.push_back(parse_double(line, "histogram bin"));
    }
    if (bins.size() != binning.bin_count()) {
        throw DataError("histogram csv: expected " + std::to_string(binning.bin_count()) + " bins, found " +
                        std::to_string(bins.size()));
    }
    try {
        return {std::move(binning), std::move(bins), flag == "1"};
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("histogram csv: ") + e.what());
    }
}

void write_histogram_csv(const std::filesystem::path& path, const FeatureHistogram& h) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << histogram_to_csv(h);
    if (!f) throw DataError("write failed: " + path.string());
}

FeatureHistogram read_histogram_csv(const std::filesystem::path& path, Binning::Kind kind) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return histogram_from_csv(ss.str(), kind);
}

}  // namespace placeloc
