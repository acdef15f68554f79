#pragma once

#include <array>
#include <vector>

#include "placeloc/image.hpp"
#include "placeloc/sift.hpp"

namespace placeloc {

/// One simulated camera view: rotation by phi, then a tilt t along x.
struct AffineView {
    double tilt = 1.0;      ///< t = 1 / cos(theta)
    double phi_deg = 0.0;   ///< longitude rotation
    GrayImage image;
    /// Maps view coordinates back to the source image:
    /// x = m[0] x' + m[1] y' + m[2],  y = m[3] x' + m[4] y' + m[5].
    std::array<double, 6> to_source{1, 0, 0, 0, 1, 0};

    double latitude_deg() const;
};

struct AsiftParams {
    std::vector<double> tilts{1.0, 1.4142135623730951, 2.0, 2.8284271247461903, 4.0};
    double phi_step_deg = 72.0;
    double antialias = 0.8;  ///< x blur sigma = antialias * sqrt(t^2 - 1)
    SiftParams sift;
};

/// Tilt that simulates a camera latitude of theta degrees.
double tilt_for_latitude(double theta_deg);

/// Number of longitudes sampled for a tilt: ceil(180 / (phi_step / t)), 1 for t = 1.
int longitude_count(double tilt, double phi_step_deg);

std::vector<AffineView> asift_views(const GrayImage& img, const std::vector<double>& tilts, double phi_step_deg,
                                    double antialias = 0.8);

/// SIFT on every simulated view; keypoint positions are mapped back to the
/// source frame and features landing outside it are dropped.
std::vector<LocalFeature> extract_asift(const GrayImage& img, const AsiftParams& params = {});

}  // namespace placeloc
