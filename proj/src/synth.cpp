#include "placeloc/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>

#include "placeloc/error.hpp"
#include "placeloc/pnm.hpp"
#include "placeloc/rng.hpp"

namespace placeloc {

namespace {

constexpr double kPi = std::numbers::pi;

enum class Pattern { Stripes, Checker, Blobs, Boxes, Dots, Grid, Rings, Zigzag, Crosshatch };

struct ClassStyle {
    Pattern pattern;
    int palette;
};

constexpr std::array<ClassStyle, 9> kStyles{{
    {Pattern::Stripes, 0},
    {Pattern::Checker, 0},
    {Pattern::Blobs, 1},
    {Pattern::Boxes, 1},
    {Pattern::Dots, 2},
    {Pattern::Grid, 2},
    {Pattern::Rings, 3},
    {Pattern::Zigzag, 3},
    {Pattern::Crosshatch, 4},
}};

// Background and foreground colors.
constexpr std::array<std::array<Rgb, 2>, 5> kPalettes{{
    {{{0.75, 0.70, 0.60}, {0.35, 0.30, 0.25}}},
    {{{0.55, 0.65, 0.80}, {0.20, 0.25, 0.45}}},
    {{{0.70, 0.80, 0.65}, {0.30, 0.45, 0.25}}},
    {{{0.85, 0.85, 0.85}, {0.45, 0.45, 0.50}}},
    {{{0.80, 0.60, 0.60}, {0.45, 0.20, 0.25}}},
}};

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double lighting(int sequence) {
    // Capture runs differ in exposure; the middle run sits between the others.
    static constexpr std::array<double, 3> kLevels{0.9, 1.0, 1.1};
    return kLevels[static_cast<std::size_t>((sequence - 1) % 3)];
}

// Continuous field whose upper quantile becomes the foreground.
GrayImage pattern_field(Pattern pattern, int size, Rng& rng) {
    GrayImage g(size, size);
    const double angle = rng.uniform(-0.26, 0.26);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double ox = rng.uniform(0.0, 100.0);
    const double oy = rng.uniform(0.0, 100.0);
    auto rot = [&](int x, int y, double& u, double& v) {
        u = c * (x + ox) + s * (y + oy);
        v = -s * (x + ox) + c * (y + oy);
    };
    switch (pattern) {
        case Pattern::Stripes: {
            // Stripe segments: bands of stripes separated by gaps.
            const double period = rng.uniform(10.0, 16.0);
            const double band = period * rng.uniform(2.0, 3.0);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double u, v;
                    rot(x, y, u, v);
                    const double gate = std::sin(2.0 * kPi * v / band) > -0.3 ? 1.0 : -1.0;
                    g.at(x, y) = std::min(std::sin(2.0 * kPi * u / period), gate);
                }
            }
            break;
        }
        case Pattern::Checker: {
            const double period = rng.uniform(18.0, 26.0);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double u, v;
                    rot(x, y, u, v);
                    g.at(x, y) = std::sin(2.0 * kPi * u / period) * std::sin(2.0 * kPi * v / period);
                }
            }
            break;
        }
        case Pattern::Blobs: {
            const int n = 120 + static_cast<int>(rng.index(60));
            std::vector<std::array<double, 4>> blobs;
            for (int i = 0; i < n; ++i) {
                blobs.push_back({rng.uniform(0, size), rng.uniform(0, size), rng.uniform(2.0, 3.5),
                                 rng.uniform(0.5, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0)});
            }
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double sum = 0.0;
                    for (const auto& b : blobs) {
                        const double d2 = (x - b[0]) * (x - b[0]) + (y - b[1]) * (y - b[1]);
                        sum += b[3] * std::exp(-d2 / (2.0 * b[2] * b[2]));
                    }
                    g.at(x, y) = sum;
                }
            }
            break;
        }
        case Pattern::Boxes: {
            // Brick wall: offset rows of blocks separated by mortar lines.
            const double bw = rng.uniform(18.0, 26.0);
            const double bh = bw * rng.uniform(0.4, 0.55);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double u, v;
                    rot(x, y, u, v);
                    const double row = std::floor(v / bh);
                    const double shift = std::fmod(row, 2.0) == 0.0 ? 0.0 : 0.5 * bw;
                    const double du = std::abs(std::fmod(u + shift, bw) - 0.5 * bw);
                    const double dv = std::abs(v - (row + 0.5) * bh);
                    g.at(x, y) = std::max(du / bw, dv / bh);
                }
            }
            break;
        }
        case Pattern::Dots: {
            const double period = rng.uniform(12.0, 16.0);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double u, v;
                    rot(x, y, u, v);
                    const double du = u - period * std::round(u / period);
                    const double dv = v - period * std::round(v / period);
                    g.at(x, y) = -std::sqrt(du * du + dv * dv);
                }
            }
            break;
        }
        case Pattern::Grid: {
            const double period = rng.uniform(16.0, 22.0);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double u, v;
                    rot(x, y, u, v);
                    const double du = std::abs(u - period * std::round(u / period));
                    const double dv = std::abs(v - period * std::round(v / period));
                    g.at(x, y) = -std::min(du, dv);
                }
            }
            break;
        }
        case Pattern::Rings: {
            const double period = rng.uniform(10.0, 14.0);
            const double cx = rng.uniform(0.2 * size, 0.8 * size);
            const double cy = rng.uniform(0.2 * size, 0.8 * size);
            const double spokes = static_cast<double>(6 + rng.index(5));
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    const double r = std::hypot(x - cx, y - cy);
                    const double gate = std::sin(spokes * std::atan2(y - cy, x - cx)) > -0.3 ? 1.0 : -1.0;
                    g.at(x, y) = std::min(std::sin(2.0 * kPi * r / period), gate);
                }
            }
            break;
        }
        case Pattern::Zigzag: {
            const double period = rng.uniform(12.0, 16.0);
            const double amp = rng.uniform(6.0, 10.0);
            const double wave = rng.uniform(20.0, 28.0);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double u, v;
                    rot(x, y, u, v);
                    const double tri = 2.0 * std::abs(v / wave - std::floor(v / wave + 0.5));
                    g.at(x, y) = std::sin(2.0 * kPi * (u + amp * 2.0 * tri) / period);
                }
            }
            break;
        }
        case Pattern::Crosshatch: {
            const double period = rng.uniform(14.0, 20.0);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    double u, v;
                    rot(x, y, u, v);
                    const double a = (u + v) / std::numbers::sqrt2;
                    const double b = (u - v) / std::numbers::sqrt2;
                    const double da = std::abs(a - period * std::round(a / period));
                    const double db = std::abs(b - period * std::round(b / period));
                    g.at(x, y) = -std::min(da, db);
                }
            }
            break;
        }
    }
    return g;
}

}  // namespace

const std::vector<std::string>& synth_class_names() {
    static const std::vector<std::string> names{"Corridor",        "ElevatorArea",  "LoungeArea",
                                                "PrinterRoom",     "ProfessorOffice", "StudentOffice",
                                                "TechnicalRoom",   "Toilet",        "VisioConference"};
    return names;
}

Image render_synthetic(int class_index, int sequence, int item, const SynthSpec& spec) {
    if (class_index < 0 || class_index >= static_cast<int>(kStyles.size())) {
        throw InvalidArgument("synthetic class index out of range");
    }
    if (spec.size < 16) throw InvalidArgument("synthetic images must be at least 16 pixels wide");
    const std::uint64_t key = mix_seed(mix_seed(mix_seed(spec.seed) ^ static_cast<std::uint64_t>(class_index)) ^
                                       (static_cast<std::uint64_t>(sequence) << 20 | static_cast<std::uint64_t>(item)));
    Rng rng(key);
    const ClassStyle style = kStyles[static_cast<std::size_t>(class_index)];
    const GrayImage field = pattern_field(style.pattern, spec.size, rng);

    // Foreground is the top (1 - q) of the field, so coverage does not
    // depend on the pattern type.
    std::vector<double> sorted(field.values().begin(), field.values().end());
    const double q = rng.uniform(0.45, 0.65);
    const auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(q * static_cast<double>(sorted.size() - 1));
    std::nth_element(sorted.begin(), nth, sorted.end());
    const double cut = *nth;
    GrayImage mask(spec.size, spec.size);
    for (std::size_t i = 0; i < mask.size(); ++i) mask.values()[i] = field.values()[i] > cut ? 1.0 : 0.0;
    mask = gaussian_blur(mask, 0.7);

    const auto& pal = kPalettes[static_cast<std::size_t>(style.palette)];
    const double light = lighting(sequence) * rng.uniform(0.96, 1.04);
    std::array<Rgb, 2> colors = pal;
    for (auto& col : colors) {
        col.r = std::clamp(col.r + rng.uniform(-0.03, 0.03), 0.0, 1.0);
        col.g = std::clamp(col.g + rng.uniform(-0.03, 0.03), 0.0, 1.0);
        col.b = std::clamp(col.b + rng.uniform(-0.03, 0.03), 0.0, 1.0);
    }
    Image img(spec.size, spec.size);
    for (int y = 0; y < spec.size; ++y) {
        for (int x = 0; x < spec.size; ++x) {
            const double m = mask.at(x, y);
            auto channel = [&](double bg, double fg) {
                return std::clamp(light * (bg + m * (fg - bg)) + 0.015 * rng.normal(), 0.0, 1.0);
            };
            img.at(x, y) = {channel(colors[0].r, colors[1].r), channel(colors[0].g, colors[1].g),
                            channel(colors[0].b, colors[1].b)};
        }
    }
    return img;
}

Manifest write_synthetic_dataset(const std::filesystem::path& dir, const SynthSpec& spec) {
    if (spec.classes < 1 || spec.classes > static_cast<int>(synth_class_names().size())) {
        throw InvalidArgument("synthetic dataset supports 1 to 9 classes");
    }
    if (spec.sequences < 1 || spec.per_sequence < 1) throw InvalidArgument("synthetic dataset needs images");
    Manifest m;
    m.base_dir = dir;
    for (int c = 0; c < spec.classes; ++c) {
        const std::string& name = synth_class_names()[static_cast<std::size_t>(c)];
        std::filesystem::create_directories(dir / "images" / name);
        for (int s = 1; s <= spec.sequences; ++s) {
            for (int i = 0; i < spec.per_sequence; ++i) {
                char file[32];
                std::snprintf(file, sizeof file, "s%d_%03d.ppm", s, i);
                const std::string rel = "images/" + name + "/" + file;
                write_pnm(dir / rel, render_synthetic(c, s, i, spec));
                m.rows.push_back({rel, name, s});
            }
        }
    }
    std::ofstream out(dir / "manifest.tsv", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "manifest.tsv").string());
    out << manifest_to_tsv(m);
    return m;
}

}  // namespace placeloc
