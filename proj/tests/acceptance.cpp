// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "placeloc/bovw.hpp"
#include "placeloc/dissimilarity.hpp"
#include "placeloc/emd.hpp"
#include "placeloc/eval.hpp"
#include "placeloc/image.hpp"
#include "placeloc/nn.hpp"
#include "placeloc/rng.hpp"
#include "placeloc/sift.hpp"
#include "placeloc/svm.hpp"
#include "support.hpp"

using namespace placeloc;
namespace fs = std::filesystem;

namespace {

using Vec = std::vector<double>;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec random_normalized(Rng& rng, std::size_t n) {
    Vec v(n);
    double s = 0.0;
    for (auto& x : v) s += (x = rng.uniform() < 0.2 ? 0.0 : rng.uniform());
    if (s == 0.0) {
        v[0] = 1.0;
        s = 1.0;
    }
    for (auto& x : v) x /= s;
    return v;
}

Outcome dissimilarity_oracles() {
    Outcome o;
    const auto t0 = Clock::now();
    Rng rng(101);
    double worst_self = 0.0;
    for (const char* id : {"euclidean", "minkowski:1", "minkowski:3", "kl", "jeffrey", "chi2", "chi2sym",
                           "bhattacharyya", "emd", "match"}) {
        const Measure m = Measure::parse(id);
        for (int t = 0; t < 100; ++t) {
            const Vec h = random_normalized(rng, 1 + rng.index(16));
            worst_self = std::max(worst_self, std::abs(m(h, h)));
        }
    }
    o.require(worst_self <= 1e-12, "identical inputs give " + fmt("%.3g", worst_self));

    int triangle_violations = 0;
    for (double r : {1.0, 2.0, 3.0}) {
        for (int t = 0; t < 1000; ++t) {
            const std::size_t n = 1 + rng.index(10);
            Vec a(n), b(n), c(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = rng.uniform(-1, 1);
                b[i] = rng.uniform(-1, 1);
                c[i] = rng.uniform(-1, 1);
            }
            if (minkowski(a, c, r) > minkowski(a, b, r) + minkowski(b, c, r) + 1e-12) ++triangle_violations;
        }
    }
    o.require(triangle_violations == 0, std::to_string(triangle_violations) + " triangle violations");

    double worst_emd = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.index(8);
        Vec h(n), k(n);
        for (auto& x : h) x = rng.uniform() < 0.25 ? 0.0 : rng.uniform();
        for (auto& x : k) x = rng.uniform() < 0.25 ? 0.0 : rng.uniform();
        h[rng.index(n)] += 0.05;
        k[rng.index(n)] += 0.05;
        std::vector<double> d(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = rng.uniform(0.1, 5.0);
        }
        const double oracle = testsupport::emd_oracle(h, k, [&](std::size_t i, std::size_t j) { return d[i * n + j]; });
        worst_emd = std::max(worst_emd, std::abs(emd(h, k, GroundDistanceMatrix(n, d)).distance - oracle));
    }
    o.require(worst_emd < 1e-6, "emd deviates by " + fmt("%.3g", worst_emd));

    double worst_match = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng.index(12);
        const Vec h = random_normalized(rng, n);
        const Vec k = random_normalized(rng, n);
        worst_match = std::max(worst_match,
                               std::abs(match_distance(h, k) - emd(h, k, GroundDistanceMatrix::linear(n)).distance));
    }
    o.require(worst_match < 1e-9, "match vs emd deviates by " + fmt("%.3g", worst_match));

    const double secs = seconds_since(t0);
    o.require(secs < 30.0, "runtime " + fmt("%.1f s", secs));
    o.note("self max " + fmt("%.1e", worst_self) + ", emd max err " + fmt("%.1e", worst_emd) + ", " +
           fmt("%.2f s", secs));
    return o;
}

Outcome hand_values() {
    Outcome o;
    const double j = jeffrey(Vec{1, 0}, Vec{0, 1});
    const double c = chi_square(Vec{0.5, 0.5}, Vec{0.25, 0.75});
    const double b = bhattacharyya(Vec{0.64, 0.36}, Vec{0.36, 0.64});
    o.require(std::abs(j - 2 * std::log(2.0)) <= 1e-9, "jeffrey = " + fmt("%.12g", j));
    o.require(std::abs(c - 0.25) <= 1e-12, "chi_square = " + fmt("%.15g", c));
    o.require(std::abs(b + std::log(0.96)) <= 1e-9, "bhattacharyya = " + fmt("%.12g", b));
    o.note("jeffrey " + fmt("%.9f", j) + ", chi2 " + fmt("%.9f", c) + ", bhattacharyya " + fmt("%.9f", b));
    return o;
}

/// Descriptor distances of features in `b` whose keypoint also appears in `a`.
std::vector<double> shared_keypoint_distances(const std::vector<LocalFeature>& a, const std::vector<LocalFeature>& b) {
    std::vector<double> out;
    for (const auto& fb : b) {
        for (const auto& fa : a) {
            const auto& ka = fa.keypoint;
            const auto& kb = fb.keypoint;
            if (ka.octave == kb.octave && ka.layer == kb.layer && std::abs(ka.x - kb.x) < 1e-6 &&
                std::abs(ka.y - kb.y) < 1e-6 && std::abs(ka.orientation - kb.orientation) < 1e-6) {
                out.push_back(testsupport::l2(fa.descriptor.values, fb.descriptor.values));
                break;
            }
        }
    }
    return out;
}

Outcome sift_invariance() {
    Outcome o;
    const auto t0 = Clock::now();
    const GrayImage img = testsupport::blob_texture(256, 600, 2024);
    const auto base = extract_sift(img);
    o.require(base.size() >= 100, "only " + std::to_string(base.size()) + " keypoints");

    const int h = img.height();
    const double rot = testsupport::mutual_nn_repeatability(
        base, extract_sift(testsupport::rotate90(img)),
        [h](const Keypoint& k) { return testsupport::MappedKeypoint{k.y, h - 1 - k.x, k.sigma}; }, 2.0, 0.0,
        std::numeric_limits<double>::infinity());
    o.require(rot >= 0.70, "rotation repeatability " + fmt("%.3f", rot));

    const double scale = testsupport::mutual_nn_repeatability(
        base, extract_sift(testsupport::upsample2(img)),
        [](const Keypoint& k) {
            return testsupport::MappedKeypoint{(k.x + 0.5) / 2 - 0.5, (k.y + 0.5) / 2 - 0.5, k.sigma};
        },
        2.0, 1.5, 2.5);
    o.require(scale >= 0.50, "2x scale repeatability " + fmt("%.3f", scale));

    GrayImage dim = img;
    for (auto& v : dim.values()) v *= 0.5;
    GrayImage bright = img;
    for (auto& v : bright.values()) v += 0.2;
    double worst = 0.0;
    std::size_t matched = 0;
    for (const auto* variant : {&dim, &bright}) {
        const auto other = extract_sift(*variant);
        const auto d = shared_keypoint_distances(base, other);
        o.require(d.size() == other.size() && !d.empty(), "photometric variant changed keypoints");
        matched += d.size();
        for (double x : d) worst = std::max(worst, x);
    }
    o.require(worst <= 1e-6, "photometric descriptor change " + fmt("%.3g", worst));

    bool len128 = true;
    for (const auto& f : base) len128 = len128 && f.descriptor.values.size() == 128;
    o.require(len128, "SIFT descriptor length");
    const GrayImage small = testsupport::blob_texture(96, 100, 21);
    Image color(96, 96);
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 96; ++x) {
            const double v = small.at(x, y);
            color.at(x, y) = {v, 0.8 * v, 0.5 + 0.5 * v};
        }
    }
    const auto rgb = extract_rgb_sift(color);
    bool len384 = !rgb.empty();
    for (const auto& f : rgb) len384 = len384 && f.descriptor.values.size() == 384;
    o.require(len384, "RGB-SIFT descriptor length over " + std::to_string(rgb.size()) + " features");

    const double secs = seconds_since(t0);
    o.require(secs < 120.0, "runtime " + fmt("%.1f s", secs));
    o.note(std::to_string(base.size()) + " keypoints, rotation " + fmt("%.3f", rot) + ", scale " +
           fmt("%.3f", scale) + ", photometric max " + fmt("%.1e", worst) + " over " + std::to_string(matched) +
           " pairs, " + fmt("%.1f s", secs));
    return o;
}

Outcome dog_laplacian() {
    Outcome o;
    const double sigma = 1.6;
    const double k = std::numbers::sqrt2;
    const int n = 33;
    const int c = n / 2;
    GrayImage impulse(n, n, 0.0);
    impulse.at(c, c) = 1.0;
    const GrayImage g1 = gaussian_blur(impulse, sigma);
    const GrayImage g2 = gaussian_blur(impulse, k * sigma);
    auto gauss = [](double r2, double s) { return std::exp(-r2 / (2 * s * s)) / (2 * std::numbers::pi * s * s); };
    auto laplacian = [&](double r2, double s) { return (r2 - 2 * s * s) / (s * s * s * s) * gauss(r2, s); };
    double err = 0.0;
    double norm = 0.0;
    double err_mid = 0.0;
    double norm_mid = 0.0;
    const double mid = sigma * std::sqrt(k);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double r2 = (x - c) * (x - c) + (y - c) * (y - c);
            const double dog = g2.at(x, y) - g1.at(x, y);
            const double approx = (k - 1) * sigma * sigma * laplacian(r2, sigma);
            err += (dog - approx) * (dog - approx);
            norm += approx * approx;
            const double approx_mid = (k - 1) * sigma * mid * laplacian(r2, mid);
            err_mid += (dog - approx_mid) * (dog - approx_mid);
            norm_mid += approx_mid * approx_mid;
        }
    }
    const double rms = std::sqrt(err / norm);
    const double rms_mid = std::sqrt(err_mid / norm_mid);
    o.require(rms < 0.10, "RMS relative error " + fmt("%.4f", rms));
    o.note("literal form " + fmt("%.4f", rms) + "; with the Laplacian at sigma*sqrt(k) " + fmt("%.4f", rms_mid));
    return o;
}

Outcome bovw_suite() {
    Outcome o;
    Rng rng(7);
    DescriptorSet data(600, Vec(8));
    for (auto& d : data) {
        for (auto& v : d) v = rng.uniform();
    }
    KmeansParams p;
    p.k = 20;
    p.seed = 1;
    KmeansTrace trace;
    const Vocabulary v = kmeans(data, p, &trace);
    int increases = 0;
    for (std::size_t i = 1; i < trace.cost.size(); ++i) increases += trace.cost[i] > trace.cost[i - 1] + 1e-9;
    o.require(increases == 0, std::to_string(increases) + " cost increases");

    // Three separated clusters against an exhaustive enumeration of seed triples.
    DescriptorSet pts;
    const double centers[3][2] = {{0, 0}, {10, 0}, {5, 9}};
    for (int i = 0; i < 30; ++i) pts.push_back({centers[i % 3][0] + 0.5 * rng.normal(), centers[i % 3][1] + 0.5 * rng.normal()});
    auto sq = [](const Vec& a, const Vec& b) { return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]); };
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_labels;
    for (std::size_t a = 0; a < 30; ++a) {
        for (std::size_t b = a + 1; b < 30; ++b) {
            for (std::size_t c = b + 1; c < 30; ++c) {
                DescriptorSet cs{pts[a], pts[b], pts[c]};
                std::vector<int> lab(30);
                for (int it = 0; it < 50; ++it) {
                    for (std::size_t i = 0; i < 30; ++i) {
                        int arg = 0;
                        for (int j = 1; j < 3; ++j) {
                            if (sq(pts[i], cs[static_cast<std::size_t>(j)]) < sq(pts[i], cs[static_cast<std::size_t>(arg)])) arg = j;
                        }
                        lab[i] = arg;
                    }
                    for (int j = 0; j < 3; ++j) {
                        Vec m{0, 0};
                        int cnt = 0;
                        for (std::size_t i = 0; i < 30; ++i) {
                            if (lab[i] != j) continue;
                            m[0] += pts[i][0];
                            m[1] += pts[i][1];
                            ++cnt;
                        }
                        if (cnt) cs[static_cast<std::size_t>(j)] = {m[0] / cnt, m[1] / cnt};
                    }
                }
                double cost = 0.0;
                for (std::size_t i = 0; i < 30; ++i) cost += sq(pts[i], cs[static_cast<std::size_t>(lab[i])]);
                if (cost < best - 1e-12) {
                    best = cost;
                    best_labels = lab;
                }
            }
        }
    }
    KmeansParams p3;
    p3.k = 3;
    p3.seed = 5;
    KmeansTrace t3;
    kmeans(pts, p3, &t3);
    bool same_partition = true;
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) {
            same_partition = same_partition && ((t3.assignment[i] == t3.assignment[j]) == (best_labels[i] == best_labels[j]));
        }
    }
    o.require(same_partition, "k=3 partition differs from the exhaustive optimum");

    double worst_sum = 0.0;
    for (int t = 0; t < 200; ++t) {
        DescriptorSet d(1 + rng.index(50), Vec(8));
        for (auto& x : d) {
            for (auto& y : x) y = rng.uniform();
        }
        const BowVector h = encode_image(d, v);
        worst_sum = std::max(worst_sum, std::abs(h.total() - 1.0));
    }
    o.require(worst_sum <= 1e-9, "encoded sum off by " + fmt("%.3g", worst_sum));

    int disagreements = 0;
    for (int q = 0; q < 1000; ++q) {
        Vec x(8);
        for (auto& y : x) y = rng.uniform();
        std::size_t arg = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < v.size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < 8; ++i) s += (x[i] - v.centers()[j][i]) * (x[i] - v.centers()[j][i]);
            if (s < bd) {
                bd = s;
                arg = j;
            }
        }
        disagreements += quantize(x, v) != arg;
    }
    o.require(disagreements == 0, std::to_string(disagreements) + " quantize disagreements");
    o.note(std::to_string(trace.iterations) + " Lloyd iterations, max encode sum error " + fmt("%.1e", worst_sum));
    return o;
}

Outcome svm_suite() {
    Outcome o;
    const auto t0 = Clock::now();
    const BinarySvm two = svm_train({{-1.0}, {1.0}}, {-1, 1}, KernelSpec::linear(), SvmParams{1000.0});
    const double at_zero = two.decision(Vec{0.0});
    o.require(std::abs(at_zero) <= 1e-3 && two.decision(Vec{-1.0}) < 0 && two.decision(Vec{1.0}) > 0,
              "2-point decision at 0 is " + fmt("%.3g", at_zero));

    Rng rng(11);
    std::vector<Vec> X;
    std::vector<std::string> labels;
    const double centers[3][2] = {{0, 0}, {3, 0}, {1.5, 3}};
    for (int i = 0; i < 150; ++i) {
        X.push_back({centers[i % 3][0] + 0.1 * rng.normal(), centers[i % 3][1] + 0.1 * rng.normal()});
        labels.push_back(std::string(1, static_cast<char>('a' + i % 3)));
    }
    const OvaModel m = ova_train(X, labels, KernelSpec::rbf(median_pairwise_distance(X)));
    int correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i) correct += ova_predict(m, X[i]).label == labels[i];
    const double acc = static_cast<double>(correct) / static_cast<double>(X.size());
    o.require(acc >= 0.99, "3-blob accuracy " + fmt("%.3f", acc));

    double worst_sum = 0.0;
    auto check_sum = [&](const BinarySvm& b) {
        double s = 0.0;
        for (double c : b.coefficients) s += c;
        worst_sum = std::max(worst_sum, std::abs(s));
    };
    check_sum(two);
    for (const auto& b : m.machines) check_sum(b);
    o.require(worst_sum <= 1e-6, "sum alpha*y = " + fmt("%.3g", worst_sum));

    std::vector<Vec> R(50, Vec(5));
    for (auto& x : R) {
        for (auto& v : x) v = rng.uniform(-1, 1);
    }
    std::vector<Vec> G(50, Vec(50));
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 50; ++j) G[i][j] = kernel(R[i], R[j], KernelSpec::rbf(0.7));
    }
    const double min_eig = testsupport::min_eigenvalue(G);
    o.require(min_eig >= -1e-8, "RBF Gram minimum eigenvalue " + fmt("%.3g", min_eig));

    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + fmt("%.1f s", secs));
    o.note("decision(0) " + fmt("%.1e", at_zero) + ", 3-blob accuracy " + fmt("%.3f", acc) + ", min eigenvalue " +
           fmt("%.1e", min_eig) + ", " + fmt("%.2f s", secs));
    return o;
}

Outcome ga_suite() {
    Outcome o;
    Rng rng(13);
    std::vector<NnObservation> obs;
    std::vector<std::string> labels;
    for (int c = 0; c < 9; ++c) labels.push_back("room" + std::to_string(c));
    for (int i = 0; i < 270; ++i) {
        const std::string truth = labels[static_cast<std::size_t>(i % 9)];
        const bool right = rng.uniform() < 0.75;
        const std::string cand = right ? truth : labels[rng.index(9)];
        obs.push_back({truth, cand, right ? rng.uniform(0.0, 0.7) : rng.uniform(0.3, 1.0)});
    }
    GaParams defaults;
    defaults.seed = 1;
    GaTrace trace;
    ga_optimize_thresholds(obs, labels, defaults, &trace);
    int drops = 0;
    for (std::size_t i = 1; i < trace.best_fitness.size(); ++i) drops += trace.best_fitness[i] < trace.best_fitness[i - 1];
    o.require(defaults.population == 200 && defaults.mutation_rate == 0.15 && defaults.crossover_rate == 0.7 &&
                  defaults.generations == 1000,
              "defaults differ");
    o.require(trace.best_fitness.size() == 1000, "generation count");
    o.require(drops == 0, std::to_string(drops) + " decreases of the best fitness");

    // Separable toy: correct matches are close, an unseen room sits further out.
    std::vector<NnObservation> toy;
    for (int i = 0; i < 10; ++i) toy.push_back({"A", "A", 0.03 * (i + 1)});
    for (int i = 0; i < 10; ++i) toy.push_back({"B", "B", 0.02 * (i + 1)});
    for (int i = 0; i < 5; ++i) toy.push_back({"Unseen", "A", 0.5});
    GaParams quick = defaults;
    quick.generations = 50;
    GaTrace toy_trace;
    const ThresholdSet t = ga_optimize_thresholds(toy, {"A", "B"}, quick, &toy_trace);
    const double f = threshold_fitness(toy, t);
    o.require(std::abs(f - 1.0) < 1e-12, "toy F = " + fmt("%.4f", f));
    o.note("final best F " + fmt("%.4f", trace.best_fitness.back()) + " after 1000 generations, toy F " +
           fmt("%.3f", f));
    return o;
}

Outcome metrics_exactness() {
    Outcome o;
    const Metrics m = metrics(8, 10, 16);
    o.require(m.precision == 0.8 && m.recall == 0.5 && m.error_rate == 0.5, "P/R/ER");
    o.require(std::abs(m.f_measure - 0.8 / 1.3) < 1e-15 && std::abs(m.f_measure - 0.6154) < 5e-5, "F");
    Rng rng(17);
    int broken = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t relevant = 1 + rng.index(500);
        const std::size_t retrieved = 1 + rng.index(500);
        const std::size_t rr = rng.index(std::min(relevant, retrieved) + 1);
        const Metrics x = metrics(rr, retrieved, relevant);
        broken += x.error_rate + x.recall != 1.0;
    }
    o.require(broken == 0, std::to_string(broken) + " triples with ER + R != 1");
    o.note("F " + fmt("%.6f", m.f_measure));
    return o;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(PLACELOC_CLI_PATH) + " " + args + " >>" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double aggregate_f(const fs::path& summary) {
    std::istringstream in(read_file(summary));
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("ALL,", 0) != 0) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return std::stod(cells.at(6));
    }
    return -1.0;
}

double accuracy_from_confusion(const fs::path& path) {
    const ConfusionMatrix m = confusion_from_csv(read_file(path));
    return m.total() ? static_cast<double>(m.trace()) / static_cast<double>(m.total()) : 0.0;
}

struct EndToEnd {
    fs::path root;
    fs::path log;
    bool data_ok = false;
    bool composite_ok = false;
};

Outcome synthetic_benchmark(EndToEnd& e2e) {
    Outcome o;
    const auto t0 = Clock::now();
    const fs::path data = e2e.root / "data";
    e2e.data_ok = run_cli("--seed 7 --out " + data.string() + " synth-dataset --classes 9 --sequences 3 --per-sequence 20",
                          e2e.log) == 0;
    o.require(e2e.data_ok, "synth-dataset");
    if (!e2e.data_ok) return o;
    const std::string manifest = (data / "manifest.tsv").string();
    const fs::path features = e2e.root / "features";

    e2e.composite_ok = run_cli("--seed 7 --jobs 1 --out " + (e2e.root / "composite").string() +
                                   " run --manifest " + manifest + " --features-dir " + features.string(),
                               e2e.log) == 0;
    o.require(e2e.composite_ok, "composite run");
    {
        std::ofstream cfg(e2e.root / "rgb.cfg");
        cfg << "features.parts = rgb\n";
    }
    const bool rgb_ok = run_cli("--seed 7 --config " + (e2e.root / "rgb.cfg").string() + " --out " +
                                    (e2e.root / "rgb").string() + " run --manifest " + manifest +
                                    " --features-dir " + features.string(),
                                e2e.log) == 0;
    o.require(rgb_ok, "RGB-only run");
    if (!e2e.composite_ok || !rgb_ok) return o;

    const double acc = accuracy_from_confusion(e2e.root / "composite" / "report" / "confusion.csv");
    const double acc_rgb = accuracy_from_confusion(e2e.root / "rgb" / "report" / "confusion.csv");
    const double f = aggregate_f(e2e.root / "composite" / "report" / "summary.csv");
    const double f_rgb = aggregate_f(e2e.root / "rgb" / "report" / "summary.csv");
    o.require(acc >= 0.90, "composite accuracy " + fmt("%.3f", acc));
    o.require(f >= f_rgb, "composite F " + fmt("%.3f", f) + " below RGB-only " + fmt("%.3f", f_rgb));
    const double secs = seconds_since(t0);
    o.require(secs < 600.0, "runtime " + fmt("%.0f s", secs));
    o.note("composite accuracy " + fmt("%.3f", acc) + " F " + fmt("%.3f", f) + ", RGB-only accuracy " +
           fmt("%.3f", acc_rgb) + " F " + fmt("%.3f", f_rgb) + ", " + fmt("%.0f s", secs));
    return o;
}

Outcome determinism(const EndToEnd& e2e) {
    Outcome o;
    if (!e2e.data_ok || !e2e.composite_ok) {
        o.require(false, "the benchmark run did not complete");
        return o;
    }
    const std::string manifest = (e2e.root / "data" / "manifest.tsv").string();
    const bool ok = run_cli("--seed 7 --jobs 3 --out " + (e2e.root / "again").string() + " run --manifest " +
                                manifest + " --features-dir " + (e2e.root / "features_again").string(),
                            e2e.log) == 0;
    o.require(ok, "second run");
    if (!ok) return o;
    int compared = 0;
    for (const char* f : {"vocab.bin", "model.bin", "predictions.csv", "report/confusion.csv", "report/summary.csv",
                          "report/pr_curve.csv"}) {
        const std::string a = read_file(e2e.root / "composite" / f);
        const std::string b = read_file(e2e.root / "again" / f);
        o.require(!a.empty() && a == b, std::string(f) + " differs");
        ++compared;
    }
    o.note(std::to_string(compared) + " artifacts byte-identical between --jobs 1 and --jobs 3");
    return o;
}

}  // namespace

int main() {
    const fs::path root = fs::temp_directory_path() / "placeloc_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    EndToEnd e2e{root, root / "pipeline.log"};

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"dissimilarity oracle suite", dissimilarity_oracles},
        {"dissimilarity hand values", hand_values},
        {"SIFT invariance suite", sift_invariance},
        {"DoG versus scale-normalized Laplacian", dog_laplacian},
        {"BoVW suite", bovw_suite},
        {"SVM suite", svm_suite},
        {"GA suite", ga_suite},
        {"metrics exactness", metrics_exactness},
        {"end-to-end synthetic benchmark", [&] { return synthetic_benchmark(e2e); }},
        {"determinism across runs and --jobs", [&] { return determinism(e2e); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o.require(false, std::string("exception: ") + ex.what());
        }
        failed += !o.pass;
        std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    if (failed == 0) fs::remove_all(root);
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
