#pragma once

#include <optional>
#include <span>
#include <vector>

#include "placeloc/image.hpp"

namespace placeloc {

struct SiftParams {
    int octaves = 4;
    int scales_per_octave = 2;           ///< DoG comparison scales s; s + 3 blur levels
    double sigma0 = 1.6;
    double assumed_blur = 0.5;           ///< blur already present in the input image
    double contrast_threshold = 0.03;    ///< on |D(x^)| for images in [0,1]
    double edge_ratio = 10.0;            ///< r in tr(H)^2 / det(H) < (r+1)^2 / r
    double orientation_sigma_factor = 1.5;
    double orientation_peak_ratio = 0.8;
    int max_refine_steps = 5;
};

/// Smallest octave side length build_scale_space accepts.
inline constexpr int kMinOctaveSize = 8;

/// Gaussian scale space. Level i of an octave has octave-relative blur
/// sigma0 * k^i with k = 2^(1/s); `sigmas` holds the absolute values in the
/// base-image frame.
struct ScaleSpace {
    struct Octave {
        std::vector<GrayImage> levels;
        std::vector<double> sigmas;
    };
    std::vector<Octave> octaves;
    int scales_per_octave = 0;
    double sigma0 = 0.0;

    double k() const;
    /// Octave-relative sigma of (fractional) level index.
    double relative_sigma(double level) const;
};

/// Per octave, differences of adjacent levels: layer i = level(i+1) - level(i).
struct DogPyramid {
    std::vector<std::vector<GrayImage>> octaves;
    int scales_per_octave = 0;
    double sigma0 = 0.0;
};

/// A strict 3x3x3 extremum in the DoG pyramid, in octave pixel coordinates.
struct ExtremumCandidate {
    int octave = 0;
    int layer = 0;
    int x = 0;
    int y = 0;

    friend bool operator==(const ExtremumCandidate&, const ExtremumCandidate&) = default;
};

struct Keypoint {
    double x = 0.0;            ///< base-image frame
    double y = 0.0;
    double sigma = 0.0;        ///< absolute scale in the base-image frame
    double orientation = 0.0;  ///< radians in [0, 2 pi)
    int octave = 0;
    int layer = 0;
    double octave_x = 0.0;     ///< position in the octave's own pixel grid
    double octave_y = 0.0;
    double octave_layer = 0.0; ///< fractional DoG layer after refinement
    double response = 0.0;     ///< interpolated DoG value
};

struct Descriptor {
    std::vector<double> values;
};

struct LocalFeature {
    Keypoint keypoint;
    Descriptor descriptor;
};

inline constexpr std::size_t kSiftDescriptorSize = 128;
inline constexpr std::size_t kRgbSiftDescriptorSize = 3 * kSiftDescriptorSize;

ScaleSpace build_scale_space(const GrayImage& img, int octaves = 4, int scales_per_octave = 2,
                             double sigma0 = 1.6, double assumed_blur = 0.5);

DogPyramid build_dog(const ScaleSpace& ss);

/// Strict extrema over the 26-neighborhood. Border pixels and the first and
/// last layer of each octave are never candidates.
std::vector<ExtremumCandidate> detect_extrema(const DogPyramid& dog);

/// Quadratic sub-pixel/sub-scale fit followed by the contrast and edge tests.
std::optional<Keypoint> refine_keypoint(const ExtremumCandidate& candidate, const DogPyramid& dog,
                                        const SiftParams& params = {});

/// Dominant gradient orientations (36-bin histogram, Gaussian window of
/// orientation_sigma_factor * scale). One keypoint per peak within
/// orientation_peak_ratio of the maximum.
std::vector<Keypoint> assign_orientations(const Keypoint& kp, const ScaleSpace& ss, const SiftParams& params = {});

/// 4x4 cells x 8 orientations from a 16x16 sample grid rotated to the
/// keypoint orientation. Returns nullopt when the window leaves the image.
std::optional<Descriptor> compute_descriptor(const Keypoint& kp, const ScaleSpace& ss);

/// L2-normalize, clamp entries at 0.2, renormalize. Returns false for an
/// all-zero vector (left untouched).
bool normalize_descriptor(std::span<double> values);

/// Full pipeline. The octave count is reduced when the image cannot hold
/// the requested number. Output sorted by (octave, layer, y, x, orientation).
std::vector<LocalFeature> extract_sift(const GrayImage& img, const SiftParams& params = {});

/// Keypoints from the grayscale image; 128-d descriptors from each of the
/// R, G and B planes, each normalized separately, concatenated to 384.
std::vector<LocalFeature> extract_rgb_sift(const Image& img, const SiftParams& params = {});

/// Number of octaves an image of this size supports (0 if none).
int max_octaves_for(int width, int height);

}  // namespace placeloc
