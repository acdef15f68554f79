#include "placeloc/asift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "placeloc/error.hpp"

namespace placeloc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

AffineView make_view(const GrayImage& img, double tilt, double phi_deg, double antialias) {
    AffineView view;
    view.tilt = tilt;
    view.phi_deg = phi_deg;
    const double c = std::cos(phi_deg * kDegToRad);
    const double s = std::sin(phi_deg * kDegToRad);
    const double w = img.width();
    const double h = img.height();
    const double src_cx = 0.5 * (w - 1);
    const double src_cy = 0.5 * (h - 1);

    // Canvas large enough to hold the rotated image.
    const int rw = std::max(1, static_cast<int>(std::ceil(std::abs(c) * w + std::abs(s) * h - 1e-9)));
    const int rh = std::max(1, static_cast<int>(std::ceil(std::abs(s) * w + std::abs(c) * h - 1e-9)));
    const double dst_cx = 0.5 * (rw - 1);
    const double dst_cy = 0.5 * (rh - 1);

    // rotated(p) = source(src_c + R(-phi) (p - dst_c))
    GrayImage rotated(rw, rh);
    for (int y = 0; y < rh; ++y) {
        for (int x = 0; x < rw; ++x) {
            const double dx = x - dst_cx;
            const double dy = y - dst_cy;
            rotated.at(x, y) = img.bilinear(src_cx + c * dx + s * dy, src_cy - s * dx + c * dy);
        }
    }

    if (tilt == 1.0) {
        view.image = std::move(rotated);
        view.to_source = {c, s, src_cx - c * dst_cx - s * dst_cy, -s, c, src_cy + s * dst_cx - c * dst_cy};
        return view;
    }

    const GrayImage blurred = gaussian_blur_x(rotated, antialias * std::sqrt(tilt * tilt - 1.0));
    const int tw = std::max(1, static_cast<int>(std::floor(rw / tilt)));
    GrayImage tilted(tw, rh);
    for (int y = 0; y < rh; ++y) {
        for (int x = 0; x < tw; ++x) tilted.at(x, y) = blurred.bilinear(x * tilt, y);
    }
    view.image = std::move(tilted);
    // view (x', y') -> rotated (t x', y') -> source.
    view.to_source = {c * tilt, s, src_cx - c * dst_cx - s * dst_cy, -s * tilt, c, src_cy + s * dst_cx - c * dst_cy};
    return view;
}

}  // namespace

double AffineView::latitude_deg() const { return std::acos(1.0 / tilt) / kDegToRad; }

double tilt_for_latitude(double theta_deg) {
    if (!(theta_deg >= 0.0 && theta_deg < 90.0)) throw InvalidArgument("latitude must be in [0, 90) degrees");
    return 1.0 / std::cos(theta_deg * kDegToRad);
}

int longitude_count(double tilt, double phi_step_deg) {
    if (!(tilt >= 1.0)) throw InvalidArgument("tilt must be >= 1");
    if (!(phi_step_deg > 0.0)) throw InvalidArgument("longitude step must be positive");
    if (tilt == 1.0) return 1;
    return static_cast<int>(std::ceil(180.0 / (phi_step_deg / tilt) - 1e-9));
}

std::vector<AffineView> asift_views(const GrayImage& img, const std::vector<double>& tilts, double phi_step_deg,
                                    double antialias) {
    if (std::find(tilts.begin(), tilts.end(), 1.0) == tilts.end()) {
        throw InvalidArgument("tilt levels must include t = 1");
    }
    std::vector<AffineView> views;
    for (double t : tilts) {
        const int count = longitude_count(t, phi_step_deg);
        const double step = t == 1.0 ? 0.0 : phi_step_deg / t;
        for (int j = 0; j < count; ++j) views.push_back(make_view(img, t, j * step, antialias));
    }
    return views;
}

std::vector<LocalFeature> extract_asift(const GrayImage& img, const AsiftParams& params) {
    std::vector<LocalFeature> out;
    for (const auto& view : asift_views(img, params.tilts, params.phi_step_deg, params.antialias)) {
        if (max_octaves_for(view.image.width(), view.image.height()) < 1) continue;
        const auto& m = view.to_source;
        for (auto& f : extract_sift(view.image, params.sift)) {
            const double x = m[0] * f.keypoint.x + m[1] * f.keypoint.y + m[2];
            const double y = m[3] * f.keypoint.x + m[4] * f.keypoint.y + m[5];
            if (x < 0.0 || y < 0.0 || x > img.width() - 1 || y > img.height() - 1) continue;
            f.keypoint.x = x;
            f.keypoint.y = y;
            out.push_back(std::move(f));
        }
    }
    return out;
}

}  // namespace placeloc
