#include "placeloc/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "placeloc/error.hpp"

namespace placeloc {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

// One convolution pass along rows (horizontal) or columns. Written as
// center + sum w_i (p_i - center) so constant regions stay exactly constant.
GrayImage convolve_pass(const GrayImage& src, const std::vector<double>& taps, bool horizontal) {
    const int w = src.width();
    const int h = src.height();
    const int radius = static_cast<int>(taps.size() / 2);
    GrayImage dst(w, h);
    const auto in = src.values();
    auto out = dst.values();
    const int len = horizontal ? w : h;
    std::vector<double> line(static_cast<std::size_t>(len + 2 * radius));
    const int lines = horizontal ? h : w;
    for (int l = 0; l < lines; ++l) {
        for (int i = -radius; i < len + radius; ++i) {
            const int c = std::clamp(i, 0, len - 1);
            const std::size_t idx = horizontal ? static_cast<std::size_t>(l) * w + c
                                               : static_cast<std::size_t>(c) * w + l;
            line[static_cast<std::size_t>(i + radius)] = in[idx];
        }
        for (int i = 0; i < len; ++i) {
            const double* p = line.data() + i;
            const double center = p[radius];
            double acc = 0.0;
            for (std::size_t t = 0; t < taps.size(); ++t) acc += taps[t] * (p[t] - center);
            const std::size_t idx = horizontal ? static_cast<std::size_t>(l) * w + i
                                               : static_cast<std::size_t>(i) * w + l;
            out[idx] = center + acc;
        }
    }
    return dst;
}

}  // namespace

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
    check_dims(width, height);
    if (!in_unit(fill.r) || !in_unit(fill.g) || !in_unit(fill.b)) {
        throw InvalidArgument("pixel channels must lie in [0,1]");
    }
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidArgument("pixel count does not match image dimensions");
    }
    for (const auto& p : pixels_) {
        if (!in_unit(p.r) || !in_unit(p.g) || !in_unit(p.b)) {
            throw InvalidArgument("pixel channels must lie in [0,1]");
        }
    }
}

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidArgument("value count does not match image dimensions");
    }
}

double GrayImage::clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
}

double GrayImage::bilinear(double x, double y) const {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const double ax = x - fx;
    const double ay = y - fy;
    const double top = (1.0 - ax) * clamped(x0, y0) + ax * clamped(x0 + 1, y0);
    const double bottom = (1.0 - ax) * clamped(x0, y0 + 1) + ax * clamped(x0 + 1, y0 + 1);
    return (1.0 - ay) * top + ay * bottom;
}

GrayImage to_grayscale(const Image& img) {
    std::vector<double> values;
    values.reserve(img.size());
    for (const auto& p : img.pixels()) values.push_back((p.r + p.g + p.b) / 3.0);
    return {img.width(), img.height(), std::move(values)};
}

GrayImage channel_plane(const Image& img, int channel) {
    if (channel < 0 || channel > 2) throw InvalidArgument("channel index must be 0, 1 or 2");
    std::vector<double> values;
    values.reserve(img.size());
    for (const auto& p : img.pixels()) values.push_back(channel == 0 ? p.r : channel == 1 ? p.g : p.b);
    return {img.width(), img.height(), std::move(values)};
}

HsvPixel rgb_to_hsv(double r, double g, double b) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    HsvPixel out;
    out.v = mx;
    if (mx <= 0.0 || delta <= 0.0) return out;  // black or achromatic
    out.s = delta / mx;
    double hp;
    if (mx == r) {
        hp = (g - b) / delta;
    } else if (mx == g) {
        hp = 2.0 + (b - r) / delta;
    } else {
        hp = 4.0 + (r - g) / delta;
    }
    double h = 60.0 * hp;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

Rgb hsv_to_rgb(const HsvPixel& hsv) {
    const double c = hsv.v * hsv.s;
    const double hp = hsv.h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(std::floor(hp)) % 6) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    const double m = hsv.v - c;
    return {r + m, g + m, b + m};
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("gaussian sigma must be positive, got " + std::to_string(sigma));
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (auto& w : taps) w /= sum;
    return taps;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    const auto taps = gaussian_kernel(sigma);
    return convolve_pass(convolve_pass(img, taps, true), taps, false);
}

GrayImage gaussian_blur_x(const GrayImage& img, double sigma) {
    return convolve_pass(img, gaussian_kernel(sigma), true);
}

GrayImage downsample2(const GrayImage& img) {
    if (img.width() < 2 || img.height() < 2) {
        throw InvalidArgument("downsample2 needs an image of at least 2x2");
    }
    GrayImage out(img.width() / 2, img.height() / 2);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) out.at(x, y) = img.at(2 * x, 2 * y);
    }
    return out;
}

}  // namespace placeloc
