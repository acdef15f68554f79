#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace placeloc {

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major color raster; every channel lies in [0, 1].
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {});
    Image(int width, int height, std::vector<Rgb> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return pixels_.size(); }
    bool empty() const { return pixels_.empty(); }

    const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
    Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

    std::span<const Rgb> pixels() const { return pixels_; }
    std::span<Rgb> pixels() { return pixels_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

/// Row-major single-channel raster. Values are nominally in [0, 1]; filtering
/// intermediates (differences of Gaussians) may leave that range.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    GrayImage(int width, int height, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double at(int x, int y) const { return values_[index(x, y)]; }
    double& at(int x, int y) { return values_[index(x, y)]; }

    /// Border-replicating access.
    double clamped(int x, int y) const;

    /// Bilinear interpolation at a continuous position (pixel centers at
    /// integer coordinates), border-replicating.
    double bilinear(double x, double y) const;

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

struct HsvPixel {
    double h = 0.0;  ///< degrees in [0, 360)
    double s = 0.0;  ///< [0, 1]
    double v = 0.0;  ///< [0, 1]
};

/// Arithmetic mean (r + g + b) / 3 per pixel.
GrayImage to_grayscale(const Image& img);

/// Extracts one channel (0 = r, 1 = g, 2 = b) as a gray plane.
GrayImage channel_plane(const Image& img, int channel);

/// Hexcone RGB -> HSV. Achromatic pixels get h = 0 and s = 0; black gets v = 0.
HsvPixel rgb_to_hsv(double r, double g, double b);

/// Inverse of rgb_to_hsv.
Rgb hsv_to_rgb(const HsvPixel& hsv);

/// Discrete Gaussian taps for offsets -radius..radius, radius = ceil(3 sigma),
/// renormalized to sum to one.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian convolution with clamp-to-border replication.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// 1-D Gaussian convolution along rows only (x direction).
GrayImage gaussian_blur_x(const GrayImage& img, double sigma);

/// Pure decimation: output(x, y) = input(2x, 2y).
GrayImage downsample2(const GrayImage& img);

}  // namespace placeloc
