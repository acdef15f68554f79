#include "placeloc/emd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "placeloc/error.hpp"

namespace placeloc {

GroundDistanceMatrix::GroundDistanceMatrix(std::size_t n, std::vector<double> values)
    : n_(n), d_(std::move(values)) {
    if (d_.size() != n * n) throw InvalidArgument("ground distance matrix must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        if (d_[i * n + i] != 0.0) throw InvalidArgument("ground distance diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d_[i * n + j];
            if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("ground distances must be finite and >= 0");
            if (v != d_[j * n + i]) throw InvalidArgument("ground distance matrix must be symmetric");
        }
    }
}

GroundDistanceMatrix GroundDistanceMatrix::linear(std::size_t n) {
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(static_cast<double>(i) - static_cast<double>(j));
    }
    return {n, std::move(d)};
}

GroundDistanceMatrix GroundDistanceMatrix::for_binning(const Binning& binning) {
    const std::size_t n = binning.bin_count();
    if (binning.axes.size() <= 1) return linear(n);
    const std::size_t dims = binning.axes.size();
    // Bin-center coordinates in [0, 1] per axis.
    std::vector<double> coords(n * dims);
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t rest = t;
        for (std::size_t a = 0; a < dims; ++a) {
            const auto len = static_cast<std::size_t>(binning.axes[a]);
            coords[t * dims + a] = (static_cast<double>(rest % len) + 0.5) / static_cast<double>(len);
            rest /= len;
        }
    }
    const bool hue_wraps = binning.kind == Binning::Kind::Hsv;
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t a = 0; a < dims; ++a) {
                double diff = std::abs(coords[i * dims + a] - coords[j * dims + a]);
                if (a == 0 && hue_wraps) diff = std::min(diff, 1.0 - diff);
                sq += diff * diff;
            }
            d[i * n + j] = d[j * n + i] = std::sqrt(sq);
        }
    }
    return {n, std::move(d)};
}

double FlowMatrix::total() const {
    double s = 0.0;
    for (double f : f_) s += f;
    return s;
}

namespace {

// Balanced transportation problem solved by the primal simplex on the
// spanning-tree basis (MODI potentials, north-west corner start).
class TransportationSimplex {
public:
    TransportationSimplex(std::vector<double> supply, std::vector<double> demand, std::vector<double> cost)
        : m_(supply.size()), n_(demand.size()), cost_(std::move(cost)), flow_(m_ * n_, 0.0),
          basic_(m_ * n_, 0) {
        north_west_corner(std::move(supply), std::move(demand));
    }

    void solve() {
        double cmax = 0.0;
        for (double c : cost_) cmax = std::max(cmax, std::abs(c));
        const double tolerance = 1e-12 * std::max(1.0, cmax);
        const std::size_t max_iterations = 50 * (m_ + n_) * (m_ + n_) + 1000;
        std::vector<double> u(m_), v(n_);
        for (std::size_t iter = 0; iter < max_iterations; ++iter) {
            build_adjacency();
            compute_potentials(u, v);
            double best = -tolerance;
            std::size_t enter = npos;
            for (std::size_t i = 0; i < m_; ++i) {
                for (std::size_t j = 0; j < n_; ++j) {
                    const std::size_t c = i * n_ + j;
                    if (basic_[c]) continue;
                    const double reduced = cost_[c] - u[i] - v[j];
                    if (reduced < best) {
                        best = reduced;
                        enter = c;
                    }
                }
            }
            if (enter == npos) return;
            pivot(enter);
        }
        throw Error("emd: transportation simplex did not converge");
    }

    double flow(std::size_t i, std::size_t j) const { return flow_[i * n_ + j]; }

private:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    struct Edge {
        std::size_t node;
        std::size_t cell;
    };

    void north_west_corner(std::vector<double> supply, std::vector<double> demand) {
        std::size_t i = 0;
        std::size_t j = 0;
        cells_.reserve(m_ + n_ - 1);
        while (true) {
            const double f = std::min(supply[i], demand[j]);
            const std::size_t c = i * n_ + j;
            flow_[c] = f;
            basic_[c] = 1;
            cells_.push_back(c);
            supply[i] -= f;
            demand[j] -= f;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (i == m_ - 1) {
                ++j;
            } else if (j == n_ - 1) {
                ++i;
            } else if (supply[i] <= demand[j]) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    // Nodes 0..m-1 are rows, m..m+n-1 are columns.
    void build_adjacency() {
        adjacency_.assign(m_ + n_, {});
        for (std::size_t c : cells_) {
            const std::size_t i = c / n_;
            const std::size_t j = c % n_;
            adjacency_[i].push_back({m_ + j, c});
            adjacency_[m_ + j].push_back({i, c});
        }
    }

    void compute_potentials(std::vector<double>& u, std::vector<double>& v) {
        std::vector<char> seen(m_ + n_, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        u[0] = 0.0;
        while (!stack.empty()) {
            const std::size_t node = stack.back();
            stack.pop_back();
            for (const auto& e : adjacency_[node]) {
                if (seen[e.node]) continue;
                seen[e.node] = 1;
                if (node < m_) {
                    v[e.node - m_] = cost_[e.cell] - u[node];
                } else {
                    u[e.node] = cost_[e.cell] - v[node - m_];
                }
                stack.push_back(e.node);
            }
        }
    }

    void pivot(std::size_t enter) {
        const std::size_t row = enter / n_;
        const std::size_t col_node = m_ + enter % n_;
        // Tree path from the entering row to the entering column.
        std::vector<std::size_t> parent_cell(m_ + n_, npos);
        std::vector<std::size_t> parent_node(m_ + n_, npos);
        std::vector<std::size_t> queue{row};
        parent_node[row] = row;
        for (std::size_t q = 0; q < queue.size() && parent_node[col_node] == npos; ++q) {
            const std::size_t node = queue[q];
            for (const auto& e : adjacency_[node]) {
                if (parent_node[e.node] != npos) continue;
                parent_node[e.node] = node;
                parent_cell[e.node] = e.cell;
                queue.push_back(e.node);
            }
        }
        std::vector<std::size_t> path;  // cells ordered from the column back to the row
        for (std::size_t node = col_node; node != row; node = parent_node[node]) path.push_back(parent_cell[node]);
        std::reverse(path.begin(), path.end());  // now ordered from the row side

        // Odd positions (1-based) along the path lose flow.
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave_pos = npos;
        for (std::size_t p = 0; p < path.size(); p += 2) {
            if (flow_[path[p]] < theta) {
                theta = flow_[path[p]];
                leave_pos = p;
            }
        }
        flow_[enter] += theta;
        for (std::size_t p = 0; p < path.size(); ++p) {
            if (p % 2 == 0) {
                flow_[path[p]] -= theta;
            } else {
                flow_[path[p]] += theta;
            }
        }
        const std::size_t leave = path[leave_pos];
        flow_[leave] = 0.0;
        basic_[leave] = 0;
        basic_[enter] = 1;
        *std::find(cells_.begin(), cells_.end(), leave) = enter;
    }

    std::size_t m_;
    std::size_t n_;
    std::vector<double> cost_;
    std::vector<double> flow_;
    std::vector<char> basic_;
    std::vector<std::size_t> cells_;
    std::vector<std::vector<Edge>> adjacency_;
};

}  // namespace

EmdResult emd(std::span<const double> h, std::span<const double> k, const GroundDistanceMatrix& ground) {
    if (h.size() != k.size()) throw InvalidArgument("emd: histogram length mismatch");
    if (ground.size() != h.size()) throw InvalidArgument("emd: ground distance matrix does not match histogram length");
    double mass_h = 0.0;
    double mass_k = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] >= 0.0) || !(k[i] >= 0.0)) throw InvalidArgument("emd: bins must be non-negative");
        mass_h += h[i];
        mass_k += k[i];
    }
    if (!(mass_h > 0.0) || !(mass_k > 0.0)) throw InvalidArgument("emd: histograms must have positive mass");

    // Only bins carrying mass take part; a zero-cost dummy bin absorbs any
    // mass difference so the problem is balanced.
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] > 0.0) rows.push_back(i);
        if (k[i] > 0.0) cols.push_back(i);
    }
    std::vector<double> supply;
    std::vector<double> demand;
    for (auto i : rows) supply.push_back(h[i]);
    for (auto j : cols) demand.push_back(k[j]);
    const bool dummy_col = mass_h > mass_k;
    const bool dummy_row = mass_k > mass_h;
    if (dummy_col) demand.push_back(mass_h - mass_k);
    if (dummy_row) supply.push_back(mass_k - mass_h);

    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    std::vector<double> cost(m * n, 0.0);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) cost[a * n + b] = ground(rows[a], cols[b]);
    }

    TransportationSimplex solver(std::move(supply), std::move(demand), std::move(cost));
    solver.solve();

    EmdResult result;
    result.flow = FlowMatrix(h.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            const double f = std::max(0.0, solver.flow(a, b));
            result.flow(rows[a], cols[b]) = f;
            result.work += f * ground(rows[a], cols[b]);
        }
    }
    result.total_flow = std::min(mass_h, mass_k);
    result.distance = result.work / result.total_flow;
    return result;
}

}  // namespace placeloc
