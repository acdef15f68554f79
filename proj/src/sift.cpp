#include "placeloc/sift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "placeloc/error.hpp"

namespace placeloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kOrientationBins = 36;
constexpr int kDescriptorCells = 4;
constexpr int kDescriptorOrientations = 8;
constexpr int kSamplesPerCell = 4;
constexpr int kSampleGrid = kDescriptorCells * kSamplesPerCell;  // 16
constexpr double kCellWidthPerSigma = 3.0;
constexpr double kDescriptorClamp = 0.2;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

int level_for(const ScaleSpace& ss, int octave, double octave_layer) {
    const int last = static_cast<int>(ss.octaves[static_cast<std::size_t>(octave)].levels.size()) - 1;
    return std::clamp(static_cast<int>(std::lround(octave_layer)), 0, last);
}

// Solves a 3x3 system by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b, std::array<double, 3>& x) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-15) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return true;
}

}  // namespace

double ScaleSpace::k() const { return std::pow(2.0, 1.0 / scales_per_octave); }

double ScaleSpace::relative_sigma(double level) const { return sigma0 * std::pow(k(), level); }

int max_octaves_for(int width, int height) {
    int side = std::min(width, height);
    int count = 0;
    while (side >= kMinOctaveSize) {
        ++count;
        side /= 2;
    }
    return count;
}

ScaleSpace build_scale_space(const GrayImage& img, int octaves, int scales_per_octave, double sigma0,
                             double assumed_blur) {
    if (octaves < 1) throw InvalidArgument("scale space needs at least one octave");
    if (scales_per_octave < 1) throw InvalidArgument("scale space needs at least one scale per octave");
    if (!(sigma0 > 0.0)) throw InvalidArgument("sigma0 must be positive");
    if (!(assumed_blur >= 0.0)) throw InvalidArgument("assumed blur must be non-negative");
    if (max_octaves_for(img.width(), img.height()) < octaves) {
        throw InvalidArgument("image of " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                              " is too small for " + std::to_string(octaves) + " octaves");
    }
    ScaleSpace ss;
    ss.scales_per_octave = scales_per_octave;
    ss.sigma0 = sigma0;
    const double k = ss.k();
    const int levels = scales_per_octave + 3;

    GrayImage base = sigma0 > assumed_blur
                         ? gaussian_blur(img, std::sqrt(sigma0 * sigma0 - assumed_blur * assumed_blur))
                         : img;
    for (int o = 0; o < octaves; ++o) {
        ScaleSpace::Octave octave;
        octave.levels.reserve(static_cast<std::size_t>(levels));
        octave.levels.push_back(std::move(base));
        for (int i = 1; i < levels; ++i) {
            const double previous = sigma0 * std::pow(k, i - 1);
            const double increment = previous * std::sqrt(k * k - 1.0);
            octave.levels.push_back(gaussian_blur(octave.levels.back(), increment));
        }
        for (int i = 0; i < levels; ++i) octave.sigmas.push_back(sigma0 * std::pow(k, i) * std::ldexp(1.0, o));
        if (o + 1 < octaves) base = downsample2(octave.levels[static_cast<std::size_t>(scales_per_octave)]);
        ss.octaves.push_back(std::move(octave));
    }
    return ss;
}

DogPyramid build_dog(const ScaleSpace& ss) {
    DogPyramid dog;
    dog.scales_per_octave = ss.scales_per_octave;
    dog.sigma0 = ss.sigma0;
    for (const auto& octave : ss.octaves) {
        std::vector<GrayImage> layers;
        for (std::size_t i = 0; i + 1 < octave.levels.size(); ++i) {
            const auto& lo = octave.levels[i];
            const auto& hi = octave.levels[i + 1];
            GrayImage d(lo.width(), lo.height());
            auto out = d.values();
            const auto a = hi.values();
            const auto b = lo.values();
            for (std::size_t p = 0; p < out.size(); ++p) out[p] = a[p] - b[p];
            layers.push_back(std::move(d));
        }
        dog.octaves.push_back(std::move(layers));
    }
    return dog;
}

std::vector<ExtremumCandidate> detect_extrema(const DogPyramid& dog) {
    std::vector<ExtremumCandidate> out;
    for (std::size_t o = 0; o < dog.octaves.size(); ++o) {
        const auto& layers = dog.octaves[o];
        for (std::size_t l = 1; l + 1 < layers.size(); ++l) {
            const auto& below = layers[l - 1];
            const auto& cur = layers[l];
            const auto& above = layers[l + 1];
            for (int y = 1; y + 1 < cur.height(); ++y) {
                for (int x = 1; x + 1 < cur.width(); ++x) {
                    const double v = cur.at(x, y);
                    bool is_max = true;
                    bool is_min = true;
                    for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            for (const GrayImage* img : {&below, &cur, &above}) {
                                if (img == &cur && dx == 0 && dy == 0) continue;
                                const double n = img->at(x + dx, y + dy);
                                if (n >= v) is_max = false;
                                if (n <= v) is_min = false;
                            }
                        }
                    }
                    if (is_max || is_min) out.push_back({static_cast<int>(o), static_cast<int>(l), x, y});
                }
            }
        }
    }
    return out;
}

std::optional<Keypoint> refine_keypoint(const ExtremumCandidate& candidate, const DogPyramid& dog,
                                        const SiftParams& params) {
    const auto& layers = dog.octaves.at(static_cast<std::size_t>(candidate.octave));
    const int nlayers = static_cast<int>(layers.size());
    const int w = layers.front().width();
    const int h = layers.front().height();
    int x = candidate.x;
    int y = candidate.y;
    int l = candidate.layer;

    auto D = [&](int ll, int xx, int yy) { return layers[static_cast<std::size_t>(ll)].at(xx, yy); };

    std::array<double, 3> offset{};
    std::array<double, 3> grad{};
    double dxx = 0, dyy = 0, dxy = 0;
    bool converged = false;
    for (int step = 0; step < params.max_refine_steps; ++step) {
        const double v = D(l, x, y);
        grad = {0.5 * (D(l, x + 1, y) - D(l, x - 1, y)), 0.5 * (D(l, x, y + 1) - D(l, x, y - 1)),
                0.5 * (D(l + 1, x, y) - D(l - 1, x, y))};
        dxx = D(l, x + 1, y) + D(l, x - 1, y) - 2.0 * v;
        dyy = D(l, x, y + 1) + D(l, x, y - 1) - 2.0 * v;
        const double dss = D(l + 1, x, y) + D(l - 1, x, y) - 2.0 * v;
        dxy = 0.25 * (D(l, x + 1, y + 1) - D(l, x - 1, y + 1) - D(l, x + 1, y - 1) + D(l, x - 1, y - 1));
        const double dxs = 0.25 * (D(l + 1, x + 1, y) - D(l + 1, x - 1, y) - D(l - 1, x + 1, y) + D(l - 1, x - 1, y));
        const double dys = 0.25 * (D(l + 1, x, y + 1) - D(l + 1, x, y - 1) - D(l - 1, x, y + 1) + D(l - 1, x, y - 1));
        const std::array<std::array<double, 3>, 3> hess{{{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}}};
        if (!solve3(hess, {-grad[0], -grad[1], -grad[2]}, offset)) return std::nullopt;
        if (std::abs(offset[0]) < 0.5 && std::abs(offset[1]) < 0.5 && std::abs(offset[2]) < 0.5) {
            converged = true;
            break;
        }
        if (!std::isfinite(offset[0]) || !std::isfinite(offset[1]) || !std::isfinite(offset[2])) return std::nullopt;
        if (std::abs(offset[0]) > w || std::abs(offset[1]) > h || std::abs(offset[2]) > nlayers) return std::nullopt;
        x += static_cast<int>(std::lround(offset[0]));
        y += static_cast<int>(std::lround(offset[1]));
        l += static_cast<int>(std::lround(offset[2]));
        if (l < 1 || l > nlayers - 2 || x < 1 || x > w - 2 || y < 1 || y > h - 2) return std::nullopt;
    }
    if (!converged) return std::nullopt;

    const double response = D(l, x, y) + 0.5 * (grad[0] * offset[0] + grad[1] * offset[1] + grad[2] * offset[2]);
    if (!(std::abs(response) >= params.contrast_threshold)) return std::nullopt;

    const double trace = dxx + dyy;
    const double det = dxx * dyy - dxy * dxy;
    const double r = params.edge_ratio;
    if (det <= 0.0 || trace * trace * r >= (r + 1.0) * (r + 1.0) * det) return std::nullopt;

    Keypoint kp;
    kp.octave = candidate.octave;
    kp.layer = l;
    kp.octave_x = x + offset[0];
    kp.octave_y = y + offset[1];
    kp.octave_layer = l + offset[2];
    const double scale = std::ldexp(1.0, candidate.octave);
    kp.x = kp.octave_x * scale;
    kp.y = kp.octave_y * scale;
    kp.sigma = dog.sigma0 * std::pow(2.0, kp.octave_layer / dog.scales_per_octave) * scale;
    kp.response = response;
    return kp;
}

std::vector<Keypoint> assign_orientations(const Keypoint& kp, const ScaleSpace& ss, const SiftParams& params) {
    const auto& octave = ss.octaves.at(static_cast<std::size_t>(kp.octave));
    const GrayImage& img = octave.levels[static_cast<std::size_t>(level_for(ss, kp.octave, kp.octave_layer))];
    const double scale = ss.relative_sigma(kp.octave_layer);
    const double sigma_w = params.orientation_sigma_factor * scale;
    const int radius = static_cast<int>(std::lround(3.0 * sigma_w));
    const int cx = static_cast<int>(std::lround(kp.octave_x));
    const int cy = static_cast<int>(std::lround(kp.octave_y));

    std::array<double, kOrientationBins> hist{};
    for (int dy = -radius; dy <= radius; ++dy) {
        const int y = cy + dy;
        if (y < 1 || y > img.height() - 2) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
            const int x = cx + dx;
            if (x < 1 || x > img.width() - 2) continue;
            if (dx * dx + dy * dy > radius * radius) continue;
            const double gx = img.at(x + 1, y) - img.at(x - 1, y);
            const double gy = img.at(x, y + 1) - img.at(x, y - 1);
            const double mag = std::hypot(gx, gy);
            if (mag <= 0.0) continue;
            const double weight = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_w * sigma_w));
            const double pos = wrap_angle(std::atan2(gy, gx)) / kTwoPi * kOrientationBins;
            const int b0 = static_cast<int>(std::floor(pos));
            const double frac = pos - b0;
            hist[static_cast<std::size_t>(b0 % kOrientationBins)] += weight * mag * (1.0 - frac);
            hist[static_cast<std::size_t>((b0 + 1) % kOrientationBins)] += weight * mag * frac;
        }
    }

    // Circular [1 4 6 4 1] / 16 smoothing.
    std::array<double, kOrientationBins> smooth{};
    for (int i = 0; i < kOrientationBins; ++i) {
        auto at = [&](int j) { return hist[static_cast<std::size_t>((j + kOrientationBins) % kOrientationBins)]; };
        smooth[static_cast<std::size_t>(i)] =
            (at(i - 2) + at(i + 2)) * (1.0 / 16) + (at(i - 1) + at(i + 1)) * (4.0 / 16) + at(i) * (6.0 / 16);
    }
    const double peak = *std::max_element(smooth.begin(), smooth.end());
    std::vector<Keypoint> out;
    if (!(peak > 0.0)) return out;
    for (int i = 0; i < kOrientationBins; ++i) {
        const double c = smooth[static_cast<std::size_t>(i)];
        const double left = smooth[static_cast<std::size_t>((i + kOrientationBins - 1) % kOrientationBins)];
        const double right = smooth[static_cast<std::size_t>((i + 1) % kOrientationBins)];
        if (!(c > left && c >= right && c >= params.orientation_peak_ratio * peak)) continue;  // plateaus count once
        const double denom = left - 2.0 * c + right;
        const double shift = denom != 0.0 ? 0.5 * (left - right) / denom : 0.0;
        Keypoint oriented = kp;
        oriented.orientation = wrap_angle((i + shift) * kTwoPi / kOrientationBins);
        out.push_back(oriented);
    }
    std::sort(out.begin(), out.end(),
              [](const Keypoint& a, const Keypoint& b) { return a.orientation < b.orientation; });
    return out;
}

bool normalize_descriptor(std::span<double> values) {
    auto l2 = [&] {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    };
    const double n0 = l2();
    if (!(n0 > 0.0)) return false;
    for (auto& v : values) v = std::min(v / n0, kDescriptorClamp);
    const double n1 = l2();
    for (auto& v : values) v /= n1;
    return true;
}

std::optional<Descriptor> compute_descriptor(const Keypoint& kp, const ScaleSpace& ss) {
    const auto& octave = ss.octaves.at(static_cast<std::size_t>(kp.octave));
    const GrayImage& img = octave.levels[static_cast<std::size_t>(level_for(ss, kp.octave, kp.octave_layer))];
    const double scale = ss.relative_sigma(kp.octave_layer);
    const double spacing = kCellWidthPerSigma * scale / kSamplesPerCell;
    const double half = 0.5 * (kSampleGrid - 1);

    // Every sample and its +-1 gradient taps must stay inside the image.
    const double reach = std::sqrt(2.0) * half * spacing + 2.0;
    if (kp.octave_x - reach < 0.0 || kp.octave_y - reach < 0.0 || kp.octave_x + reach > img.width() - 1 ||
        kp.octave_y + reach > img.height() - 1) {
        return std::nullopt;
    }

    const double c = std::cos(kp.orientation);
    const double s = std::sin(kp.orientation);
    constexpr int kBins = kDescriptorCells * kDescriptorCells * kDescriptorOrientations;
    std::array<double, kBins> hist{};
    const double window_sigma = 0.5 * kSampleGrid;

    for (int j = 0; j < kSampleGrid; ++j) {
        for (int i = 0; i < kSampleGrid; ++i) {
            const double u = (i - half) * spacing;
            const double v = (j - half) * spacing;
            const double px = kp.octave_x + c * u - s * v;
            const double py = kp.octave_y + s * u + c * v;
            const double gx = img.bilinear(px + 1.0, py) - img.bilinear(px - 1.0, py);
            const double gy = img.bilinear(px, py + 1.0) - img.bilinear(px, py - 1.0);
            const double mag = std::hypot(gx, gy);
            if (mag <= 0.0) continue;
            const double weight =
                std::exp(-((i - half) * (i - half) + (j - half) * (j - half)) / (2.0 * window_sigma * window_sigma));
            const double angle = wrap_angle(std::atan2(gy, gx) - kp.orientation);

            // Trilinear split over (cell row, cell column, orientation).
            const double cxf = (i + 0.5) / kSamplesPerCell - 0.5;
            const double cyf = (j + 0.5) / kSamplesPerCell - 0.5;
            const double of = angle / kTwoPi * kDescriptorOrientations;
            const int x0 = static_cast<int>(std::floor(cxf));
            const int y0 = static_cast<int>(std::floor(cyf));
            const int o0 = static_cast<int>(std::floor(of));
            const double fx = cxf - x0;
            const double fy = cyf - y0;
            const double fo = of - o0;
            const double contribution = weight * mag;
            for (int dy = 0; dy <= 1; ++dy) {
                const int yb = y0 + dy;
                if (yb < 0 || yb >= kDescriptorCells) continue;
                const double wy = dy ? fy : 1.0 - fy;
                for (int dx = 0; dx <= 1; ++dx) {
                    const int xb = x0 + dx;
                    if (xb < 0 || xb >= kDescriptorCells) continue;
                    const double wx = dx ? fx : 1.0 - fx;
                    for (int d_o = 0; d_o <= 1; ++d_o) {
                        const int ob = (o0 + d_o) % kDescriptorOrientations;
                        const double wo = d_o ? fo : 1.0 - fo;
                        hist[static_cast<std::size_t>((yb * kDescriptorCells + xb) * kDescriptorOrientations + ob)] +=
                            contribution * wy * wx * wo;
                    }
                }
            }
        }
    }
    Descriptor d;
    d.values.assign(hist.begin(), hist.end());
    if (!normalize_descriptor(d.values)) return std::nullopt;
    return d;
}

namespace {

struct DetectedKeypoints {
    ScaleSpace ss;
    std::vector<Keypoint> keypoints;  // oriented, sorted
};

DetectedKeypoints detect_oriented(const GrayImage& img, const SiftParams& params) {
    const int octaves = std::min(params.octaves, max_octaves_for(img.width(), img.height()));
    if (octaves < 1) {
        throw InvalidArgument("image of " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                              " is too small for feature extraction");
    }
    DetectedKeypoints out;
    out.ss = build_scale_space(img, octaves, params.scales_per_octave, params.sigma0, params.assumed_blur);
    const DogPyramid dog = build_dog(out.ss);
    for (const auto& candidate : detect_extrema(dog)) {
        const auto refined = refine_keypoint(candidate, dog, params);
        if (!refined) continue;
        for (auto& oriented : assign_orientations(*refined, out.ss, params)) out.keypoints.push_back(oriented);
    }
    std::stable_sort(out.keypoints.begin(), out.keypoints.end(), [](const Keypoint& a, const Keypoint& b) {
        return std::tie(a.octave, a.layer, a.y, a.x, a.orientation) <
               std::tie(b.octave, b.layer, b.y, b.x, b.orientation);
    });
    return out;
}

}  // namespace

std::vector<LocalFeature> extract_sift(const GrayImage& img, const SiftParams& params) {
    const auto detected = detect_oriented(img, params);
    std::vector<LocalFeature> out;
    for (const auto& kp : detected.keypoints) {
        if (auto d = compute_descriptor(kp, detected.ss)) out.push_back({kp, std::move(*d)});
    }
    return out;
}

std::vector<LocalFeature> extract_rgb_sift(const Image& img, const SiftParams& params) {
    const auto detected = detect_oriented(to_grayscale(img), params);
    const int octaves = static_cast<int>(detected.ss.octaves.size());
    std::array<ScaleSpace, 3> planes;
    for (int c = 0; c < 3; ++c) {
        planes[static_cast<std::size_t>(c)] = build_scale_space(channel_plane(img, c), octaves, params.scales_per_octave,
                                                                params.sigma0, params.assumed_blur);
    }
    std::vector<LocalFeature> out;
    for (const auto& kp : detected.keypoints) {
        // The window test depends only on geometry, so it agrees across planes.
        if (!compute_descriptor(kp, detected.ss)) continue;
        Descriptor combined;
        combined.values.reserve(kRgbSiftDescriptorSize);
        for (const auto& plane : planes) {
            auto d = compute_descriptor(kp, plane);
            if (d) {
                combined.values.insert(combined.values.end(), d->values.begin(), d->values.end());
            } else {
                combined.values.insert(combined.values.end(), kSiftDescriptorSize, 0.0);  // flat channel
            }
        }
        out.push_back({kp, std::move(combined)});
    }
    return out;
}

}  // namespace placeloc
