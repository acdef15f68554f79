#pragma once
// Independent reference implementations and fixtures shared by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "placeloc/image.hpp"
#include "placeloc/rng.hpp"
#include "placeloc/sift.hpp"

namespace testsupport {

/// Optimal transport cost by successive shortest paths (Bellman-Ford on the
/// residual graph). Returns work / total flow with total flow = min masses.
inline double emd_oracle(std::span<const double> h, std::span<const double> k,
                         const std::function<double(std::size_t, std::size_t)>& d) {
    const std::size_t n = h.size();
    const std::size_t m = k.size();
    // Nodes: 0 = source, 1..n = supplies, n+1..n+m = demands, n+m+1 = sink.
    const std::size_t nodes = n + m + 2;
    const std::size_t src = 0;
    const std::size_t sink = n + m + 1;
    struct Edge {
        std::size_t to;
        double cap;
        double cost;
        std::size_t rev;
    };
    std::vector<std::vector<Edge>> g(nodes);
    auto add = [&](std::size_t a, std::size_t b, double cap, double cost) {
        g[a].push_back({b, cap, cost, g[b].size()});
        g[b].push_back({a, 0.0, -cost, g[a].size() - 1});
    };
    double total_h = 0.0;
    double total_k = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        add(src, 1 + i, h[i], 0.0);
        total_h += h[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
        add(1 + n + j, sink, k[j], 0.0);
        total_k += k[j];
    }
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) add(1 + i, 1 + n + j, inf, d(i, j));
    }
    const double target = std::min(total_h, total_k);
    const double eps = 1e-15 * std::max(1.0, target);
    double flow = 0.0;
    double work = 0.0;
    while (target - flow > eps) {
        std::vector<double> dist(nodes, inf);
        std::vector<std::size_t> prev_node(nodes, nodes);
        std::vector<std::size_t> prev_edge(nodes, 0);
        dist[src] = 0.0;
        for (std::size_t round = 0; round < nodes; ++round) {
            bool changed = false;
            for (std::size_t u = 0; u < nodes; ++u) {
                if (dist[u] == inf) continue;
                for (std::size_t e = 0; e < g[u].size(); ++e) {
                    const Edge& ed = g[u][e];
                    if (ed.cap <= eps) continue;
                    if (dist[u] + ed.cost < dist[ed.to] - 1e-15) {
                        dist[ed.to] = dist[u] + ed.cost;
                        prev_node[ed.to] = u;
                        prev_edge[ed.to] = e;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        if (dist[sink] == inf) break;
        double push = target - flow;
        for (std::size_t v = sink; v != src; v = prev_node[v]) {
            push = std::min(push, g[prev_node[v]][prev_edge[v]].cap);
        }
        for (std::size_t v = sink; v != src; v = prev_node[v]) {
            Edge& ed = g[prev_node[v]][prev_edge[v]];
            ed.cap -= push;
            g[v][ed.rev].cap += push;
        }
        flow += push;
        work += push * dist[sink];
    }
    return flow > 0.0 ? work / flow : 0.0;
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double min_eigenvalue(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-22) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a[p][r];
                    const double aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
    }
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mn = std::min(mn, a[i][i]);
    return mn;
}

/// Seeded random-blob texture in [0.05, 0.75].
inline placeloc::GrayImage blob_texture(int size, int blobs, std::uint64_t seed) {
    placeloc::Rng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
    for (int b = 0; b < blobs; ++b) {
        const double cx = rng.uniform(0, size);
        const double cy = rng.uniform(0, size);
        const double s = rng.uniform(1.5, 6.0);
        const double a = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.0);
        const int r = static_cast<int>(4 * s);
        for (int y = std::max(0, static_cast<int>(cy) - r); y < std::min(size, static_cast<int>(cy) + r); ++y) {
            for (int x = std::max(0, static_cast<int>(cx) - r); x < std::min(size, static_cast<int>(cx) + r); ++x) {
                const double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                v[static_cast<std::size_t>(y) * static_cast<std::size_t>(size) + static_cast<std::size_t>(x)] +=
                    a * std::exp(-d / (2 * s * s));
            }
        }
    }
    for (auto& x : v) x = std::clamp(0.4 + 0.35 * x, 0.05, 0.75);
    return placeloc::GrayImage(size, size, std::move(v));
}

/// Quarter turn: source pixel (x, y) lands at (h - 1 - y, x).
inline placeloc::GrayImage rotate90(const placeloc::GrayImage& img) {
    placeloc::GrayImage out(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) out.at(img.height() - 1 - y, x) = img.at(x, y);
    }
    return out;
}

/// Bilinear 2x enlargement; output pixel (x, y) samples source ((x+0.5)/2-0.5, ...).
inline placeloc::GrayImage upsample2(const placeloc::GrayImage& img) {
    placeloc::GrayImage out(2 * img.width(), 2 * img.height());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) out.at(x, y) = img.bilinear((x + 0.5) / 2 - 0.5, (y + 0.5) / 2 - 0.5);
    }
    return out;
}

inline double l2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

struct MappedKeypoint {
    double x;
    double y;
    double sigma;
};

/// Fraction of A's features whose mutual nearest neighbor in B (descriptor
/// L2) maps back within `max_px` and has sigma_B / sigma_A in [lo, hi].
inline double mutual_nn_repeatability(const std::vector<placeloc::LocalFeature>& a,
                                      const std::vector<placeloc::LocalFeature>& b,
                                      const std::function<MappedKeypoint(const placeloc::Keypoint&)>& b_to_a,
                                      double max_px, double lo, double hi) {
    if (a.empty() || b.empty()) return 0.0;
    auto nearest = [](const placeloc::LocalFeature& f, const std::vector<placeloc::LocalFeature>& set) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < set.size(); ++j) {
            const double d = l2(f.descriptor.values, set[j].descriptor.values);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return best;
    };
    std::vector<std::size_t> nn_b(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) nn_b[j] = nearest(b[j], a);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t j = nearest(a[i], b);
        if (nn_b[j] != i) continue;
        const MappedKeypoint m = b_to_a(b[j].keypoint);
        const double ratio = b[j].keypoint.sigma / a[i].keypoint.sigma;
        if (std::hypot(m.x - a[i].keypoint.x, m.y - a[i].keypoint.y) <= max_px && ratio >= lo && ratio <= hi) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(a.size());
}

/// Mutual nearest-neighbor pairs (descriptor L2) as index pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> mutual_nn_pairs(const std::vector<placeloc::LocalFeature>& a,
                                                                        const std::vector<placeloc::LocalFeature>& b) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (a.empty() || b.empty()) return out;
    std::vector<std::size_t> nn_a(a.size());
    std::vector<std::size_t> nn_b(b.size());
    std::vector<double> best_b(b.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = l2(a[i].descriptor.values, b[j].descriptor.values);
            if (d < best) {
                best = d;
                nn_a[i] = j;
            }
            if (d < best_b[j]) {
                best_b[j] = d;
                nn_b[j] = i;
            }
        }
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (nn_b[nn_a[i]] == i) out.emplace_back(i, nn_a[i]);
    }
    return out;
}

}  // namespace testsupport
