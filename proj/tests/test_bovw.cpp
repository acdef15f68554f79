#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "placeloc/bovw.hpp"
#include "placeloc/error.hpp"
#include "placeloc/rng.hpp"

using namespace placeloc;

namespace {

DescriptorSet random_set(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    DescriptorSet out(n, std::vector<double>(dim));
    for (auto& d : out) {
        for (auto& v : d) v = rng.uniform();
    }
    return out;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

/// Three tight, well separated 2-D groups of ten points.
DescriptorSet three_clusters(std::uint64_t seed) {
    Rng rng(seed);
    const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {5.0, 9.0}};
    DescriptorSet out;
    for (int i = 0; i < 30; ++i) {
        const auto& c = centers[i % 3];
        out.push_back({c[0] + 0.5 * rng.normal(), c[1] + 0.5 * rng.normal()});
    }
    return out;
}

/// Labels renumbered by first occurrence.
std::vector<int> canonical(const std::vector<int>& labels) {
    std::vector<int> map(labels.size(), -1);
    std::vector<int> out;
    int next = 0;
    for (int l : labels) {
        if (map[static_cast<std::size_t>(l)] < 0) map[static_cast<std::size_t>(l)] = next++;
        out.push_back(map[static_cast<std::size_t>(l)]);
    }
    return out;
}

/// Exhaustive oracle: Lloyd from every triple of data points, keeping the
/// lowest-cost partition.
std::vector<int> brute_force_partition(const DescriptorSet& pts) {
    // Any optimal 3-partition of separated groups is a Voronoi partition of
    // its own means; enumerating every seed triple and running Lloyd to a
    // fixed point reaches it.
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_labels;
    const std::size_t n = pts.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            for (std::size_t c = b + 1; c < n; ++c) {
                DescriptorSet centers{pts[a], pts[b], pts[c]};
                std::vector<int> labels(n, 0);
                for (int it = 0; it < 100; ++it) {
                    for (std::size_t i = 0; i < n; ++i) {
                        int arg = 0;
                        for (int j = 1; j < 3; ++j) {
                            if (sq_dist(pts[i], centers[static_cast<std::size_t>(j)]) <
                                sq_dist(pts[i], centers[static_cast<std::size_t>(arg)])) {
                                arg = j;
                            }
                        }
                        labels[i] = arg;
                    }
                    DescriptorSet next(3, std::vector<double>(2, 0.0));
                    std::vector<int> count(3, 0);
                    for (std::size_t i = 0; i < n; ++i) {
                        const auto l = static_cast<std::size_t>(labels[i]);
                        next[l][0] += pts[i][0];
                        next[l][1] += pts[i][1];
                        ++count[l];
                    }
                    for (std::size_t j = 0; j < 3; ++j) {
                        if (count[j] == 0) continue;
                        next[j][0] /= count[j];
                        next[j][1] /= count[j];
                        centers[j] = next[j];
                    }
                }
                double cost = 0.0;
                for (std::size_t i = 0; i < n; ++i) cost += sq_dist(pts[i], centers[static_cast<std::size_t>(labels[i])]);
                if (cost < best - 1e-12) {
                    best = cost;
                    best_labels = labels;
                }
            }
        }
    }
    return canonical(best_labels);
}

}  // namespace

TEST_CASE("default vocabulary size is one hundred") {
    CHECK(KmeansParams{}.k == 100);
    CHECK(kDefaultVocabularySize == 100);
    CHECK(kDefaultDescriptorCap == 200000);
}

TEST_CASE("k equal to the number of distinct points gives zero cost") {
    DescriptorSet pts = random_set(12, 4, 1);
    pts.push_back(pts[3]);  // duplicates do not count as distinct
    KmeansParams p;
    p.k = 12;
    p.seed = 5;
    KmeansTrace trace;
    const Vocabulary v = kmeans(pts, p, &trace);
    REQUIRE(v.size() == 12);
    CHECK(trace.cost.back() == doctest::Approx(0.0));
    std::set<std::vector<double>> centers(v.centers().begin(), v.centers().end());
    std::set<std::vector<double>> points(pts.begin(), pts.end());
    CHECK(centers == points);
    CHECK(v.built_by() == Vocabulary::BuiltBy::Kmeans);
}

TEST_CASE("too few distinct points is a data error") {
    DescriptorSet pts(10, std::vector<double>{1.0, 2.0});
    pts.push_back({0.0, 0.0});
    KmeansParams p;
    p.k = 3;
    CHECK_THROWS_AS(kmeans(pts, p), DataError);
    p.k = 0;
    CHECK_THROWS_AS(kmeans(pts, p), InvalidArgument);
    p.k = 2;
    p.max_iter = 0;
    CHECK_THROWS_AS(kmeans(pts, p), InvalidArgument);
    CHECK_THROWS_AS(kmeans({}, KmeansParams{}), InvalidArgument);
}

TEST_CASE("three separated clusters match the exhaustive optimum") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const DescriptorSet pts = three_clusters(seed);
        KmeansParams p;
        p.k = 3;
        p.seed = seed * 17;
        KmeansTrace trace;
        kmeans(pts, p, &trace);
        CAPTURE(seed);
        CHECK(canonical(trace.assignment) == brute_force_partition(pts));
        CHECK(trace.converged);
    }
}

TEST_CASE("k-means cost never increases") {
    for (const char* dist : {"euclidean", "minkowski:1", "chi2"}) {
        const DescriptorSet pts = random_set(400, 8, 7);
        KmeansParams p;
        p.k = 15;
        p.seed = 3;
        p.distance_id = dist;
        KmeansTrace trace;
        const Vocabulary v = kmeans(pts, p, &trace);
        CAPTURE(dist);
        CHECK(v.distance_id() == dist);
        REQUIRE(trace.cost.size() >= 2);
        CHECK(static_cast<int>(trace.cost.size()) == trace.iterations);
        if (std::string(dist) == "euclidean") {
            for (std::size_t i = 1; i < trace.cost.size(); ++i) CHECK(trace.cost[i] <= trace.cost[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("k-means is a pure function of its inputs") {
    const DescriptorSet pts = random_set(300, 16, 9);
    KmeansParams p;
    p.k = 10;
    p.seed = 42;
    const Vocabulary a = kmeans(pts, p);
    p.jobs = 3;
    const Vocabulary b = kmeans(pts, p);
    CHECK(a == b);
    p.seed = 43;
    CHECK_FALSE(kmeans(pts, p) == a);
}

TEST_CASE("k-means respects max_iter") {
    const DescriptorSet pts = random_set(500, 4, 11);
    KmeansParams p;
    p.k = 20;
    p.max_iter = 2;
    KmeansTrace trace;
    kmeans(pts, p, &trace);
    CHECK(trace.iterations <= 2);
}

TEST_CASE("incremental vocabulary extremes") {
    DescriptorSet pts{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 0}, {2, 0, 0}};
    const Vocabulary one = incremental_vocab(pts, std::numeric_limits<double>::infinity());
    CHECK(one.size() == 1);
    CHECK(one.built_by() == Vocabulary::BuiltBy::Incremental);
    // {1,0,0}, {1,0,0} and {2,0,0} coincide after L1 normalization.
    const Vocabulary distinct = incremental_vocab(pts, 0.0);
    CHECK(distinct.size() == 4);
    CHECK(distinct.centers()[3] == std::vector<double>{0.5, 0.5, 0.0});
    CHECK_THROWS_AS(incremental_vocab({}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(incremental_vocab(pts, -1.0), InvalidArgument);
}

TEST_CASE("incremental vocabulary depends on processing order") {
    // With threshold 0.5 under L1 (after L1 normalization), b lies within
    // reach of both a and c while a and c are 0.6 apart.
    const std::vector<double> a{0.7, 0.3, 0.0};
    const std::vector<double> b{0.5, 0.3, 0.2};
    const std::vector<double> c{0.4, 0.3, 0.3};
    const Vocabulary forward = incremental_vocab({b, a, c}, 0.5, "minkowski:1");
    const Vocabulary reversed = incremental_vocab({a, c, b}, 0.5, "minkowski:1");
    CHECK(forward.size() == 1);
    CHECK(reversed.size() == 2);
}

TEST_CASE("quantize picks the nearest center with ties to the lowest index") {
    DescriptorSet centers;
    for (int i = 0; i < 10; ++i) centers.push_back({static_cast<double>(i), 0.0});
    const Vocabulary v(centers, "euclidean", Vocabulary::BuiltBy::Kmeans, 0);
    CHECK(quantize(std::vector<double>{7.0, 0.0}, v) == 7);
    CHECK(quantize(std::vector<double>{2.5, 0.0}, v) == 2);

    DescriptorSet tie{{0, 0}, {5, 5}, {1, 0}, {0, 5}, {9, 9}, {-1, 0}};
    const Vocabulary w(tie, "euclidean", Vocabulary::BuiltBy::Kmeans, 0);
    CHECK(quantize(std::vector<double>{0.0, 0.0}, w) == 0);
    // Equidistant to centers 2 and 5.
    const Vocabulary u({{9, 9}, {8, 8}, {1, 0}, {7, 7}, {6, 6}, {-1, 0}}, "euclidean",
                       Vocabulary::BuiltBy::Kmeans, 0);
    CHECK(quantize(std::vector<double>{0.0, 0.0}, u) == 2);
    CHECK_THROWS_AS(quantize(std::vector<double>{1.0}, u), InvalidArgument);
}

TEST_CASE("quantize agrees with a linear scan") {
    const DescriptorSet centers = random_set(25, 6, 13);
    const Vocabulary v(centers, "euclidean", Vocabulary::BuiltBy::Kmeans, 0);
    const DescriptorSet queries = random_set(1000, 6, 14);
    for (const auto& q : queries) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < centers.size(); ++j) {
            if (sq_dist(q, centers[j]) < sq_dist(q, centers[best])) best = j;
        }
        CHECK(quantize(q, v) == best);
    }
}

TEST_CASE("encoding counts words and normalizes") {
    DescriptorSet centers{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    const Vocabulary v(centers, "euclidean", Vocabulary::BuiltBy::Kmeans, 0);
    const DescriptorSet five(5, std::vector<double>{0.9, 1.1});
    const BowVector h = encode_image(five, v);
    REQUIRE(h.size() == 4);
    CHECK(h[3] == 1.0);
    CHECK(h[0] == 0.0);
    CHECK_THROWS_AS(encode_image({}, v), DataError);

    const DescriptorSet rc = random_set(30, 8, 20);
    const Vocabulary rv(rc, "euclidean", Vocabulary::BuiltBy::Kmeans, 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DescriptorSet d = random_set(1 + seed * 7, 8, 100 + seed);
        const BowVector enc = encode_image(d, rv);
        std::vector<double> counts(30, 0.0);
        std::set<std::size_t> words;
        for (const auto& x : d) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < rc.size(); ++j) {
                if (sq_dist(x, rc[j]) < sq_dist(x, rc[best])) best = j;
            }
            counts[best] += 1.0;
            words.insert(quantize(x, rv));
        }
        double sum = 0.0;
        std::set<std::size_t> support;
        for (std::size_t j = 0; j < 30; ++j) {
            CHECK(enc[j] == doctest::Approx(counts[j] / static_cast<double>(d.size())));
            sum += enc[j];
            if (enc[j] > 0.0) support.insert(j);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        CHECK(support == words);
    }
}

TEST_CASE("descriptor sampling") {
    const DescriptorSet pts = random_set(100, 3, 30);
    CHECK(sample_descriptors(pts, 200, 1) == pts);
    const DescriptorSet s = sample_descriptors(pts, 40, 1);
    REQUIRE(s.size() == 40);
    CHECK(s == sample_descriptors(pts, 40, 1));
    CHECK_FALSE(s == sample_descriptors(pts, 40, 2));
    // Original order is kept.
    std::size_t pos = 0;
    for (const auto& x : s) {
        while (pos < pts.size() && pts[pos] != x) ++pos;
        REQUIRE(pos < pts.size());
        ++pos;
    }
}

TEST_CASE("vocabulary file round trip") {
    KmeansParams p;
    p.k = 6;
    p.seed = 77;
    p.distance_id = "chi2";
    const Vocabulary v = kmeans(random_set(60, 5, 31), p);
    std::stringstream first;
    write_vocabulary(first, v);
    const Vocabulary back = read_vocabulary(first);
    CHECK(back.size() == 6);
    CHECK(back.dim() == 5);
    CHECK(back.distance_id() == "chi2");
    CHECK(back.seed() == 77);
    CHECK(back.built_by() == Vocabulary::BuiltBy::Kmeans);
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < v.dim(); ++j) {
            CHECK(back.centers()[i][j] == static_cast<double>(static_cast<float>(v.centers()[i][j])));
        }
    }
    std::stringstream second;
    write_vocabulary(second, back);
    std::stringstream again;
    write_vocabulary(again, v);
    CHECK(second.str() == again.str());
    CHECK(second.str().substr(0, 4) == "PLVC");

    std::istringstream truncated(again.str().substr(0, again.str().size() - 3));
    CHECK_THROWS_AS(read_vocabulary(truncated), DataError);
    std::istringstream garbage("nope");
    CHECK_THROWS_AS(read_vocabulary(garbage), DataError);

    const std::string csv = vocabulary_to_csv(back);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 6);
}
