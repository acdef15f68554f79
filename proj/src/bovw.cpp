#include "placeloc/bovw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "placeloc/binary_io.hpp"
#include "placeloc/error.hpp"
#include "placeloc/parallel.hpp"
#include "placeloc/rng.hpp"

namespace placeloc {

namespace {

constexpr char kMagic[5] = "PLVC";
constexpr std::uint32_t kVersion = 1;

bool is_euclidean(const Measure& m) { return m.kind() == Measure::Kind::Minkowski && m.order() == 2.0; }

double squared_l2(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

// Distance used for ranking and cost: squared L2 for the Euclidean measure
// (same ordering, cheaper), the measure itself otherwise.
double rank_distance(const Measure& m, std::span<const double> a, std::span<const double> b) {
    return is_euclidean(m) ? squared_l2(a, b) : m(a, b);
}

struct Nearest {
    std::size_t index = 0;
    double distance = 0.0;
};

Nearest nearest(const Measure& m, std::span<const double> x, const DescriptorSet& centers) {
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = rank_distance(m, x, centers[c]);
        if (d < best.distance) best = {c, d};
    }
    return best;
}

void check_dims(const DescriptorSet& data) {
    if (data.empty()) throw InvalidArgument("descriptor set is empty");
    const std::size_t dim = data.front().size();
    if (dim == 0) throw InvalidArgument("descriptors have zero dimension");
    for (const auto& d : data) {
        if (d.size() != dim) throw InvalidArgument("descriptors differ in dimension");
    }
}

std::size_t count_distinct(const DescriptorSet& data) {
    std::vector<const std::vector<double>*> ptrs;
    ptrs.reserve(data.size());
    for (const auto& d : data) ptrs.push_back(&d);
    std::sort(ptrs.begin(), ptrs.end(), [](auto* a, auto* b) { return *a < *b; });
    return static_cast<std::size_t>(
        std::unique(ptrs.begin(), ptrs.end(), [](auto* a, auto* b) { return *a == *b; }) - ptrs.begin());
}

DescriptorSet seed_plus_plus(const DescriptorSet& data, std::size_t k, const Measure& m, Rng& rng) {
    DescriptorSet centers;
    centers.push_back(data[rng.index(data.size())]);
    std::vector<double> weight(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double d = rank_distance(m, data[i], centers[0]);
        weight[i] = is_euclidean(m) ? d : d * d;
    }
    while (centers.size() < k) {
        const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double running = 0.0;
            pick = data.size();
            for (std::size_t i = 0; i < data.size(); ++i) {
                running += weight[i];
                if (weight[i] > 0.0 && running > target) {
                    pick = i;
                    break;
                }
            }
            if (pick == data.size()) {  // rounding at the tail
                for (std::size_t i = data.size(); i-- > 0;) {
                    if (weight[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        }
        centers.push_back(data[pick]);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double d = rank_distance(m, data[i], centers.back());
            weight[i] = std::min(weight[i], is_euclidean(m) ? d : d * d);
        }
    }
    return centers;
}

}  // namespace

Vocabulary::Vocabulary(DescriptorSet centers, std::string distance_id, BuiltBy built_by, std::uint64_t seed)
    : centers_(std::move(centers)),
      distance_id_(std::move(distance_id)),
      measure_(Measure::parse(distance_id_)),
      built_by_(built_by),
      seed_(seed) {
    if (centers_.empty()) throw InvalidArgument("vocabulary needs at least one word");
    check_dims(centers_);
    for (const auto& c : centers_) {
        for (double v : c) {
            if (!std::isfinite(v)) throw InvalidArgument("vocabulary centers must be finite");
        }
    }
}

std::string to_string(Vocabulary::BuiltBy b) { return b == Vocabulary::BuiltBy::Kmeans ? "kmeans" : "incremental"; }

Vocabulary kmeans(const DescriptorSet& data, const KmeansParams& params, KmeansTrace* trace) {
    check_dims(data);
    if (params.k < 1) throw InvalidArgument("k must be at least 1");
    if (params.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    const auto k = static_cast<std::size_t>(params.k);
    if (count_distinct(data) < k) {
        throw DataError("k-means needs at least k = " + std::to_string(k) + " distinct descriptors");
    }
    const Measure m = Measure::parse(params.distance_id);
    Rng rng(params.seed);
    DescriptorSet centers = seed_plus_plus(data, k, m, rng);
    const std::size_t n = data.size();
    const std::size_t dim = data.front().size();

    std::vector<int> assignment(n, -1);
    std::vector<Nearest> found(n);
    KmeansTrace local;
    KmeansTrace& tr = trace ? *trace : local;
    tr = {};

    for (int iter = 0; iter < params.max_iter; ++iter) {
        parallel_for(n, params.jobs, [&](std::size_t i) { found[i] = nearest(m, data[i], centers); });
        bool changed = false;
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int c = static_cast<int>(found[i].index);
            if (assignment[i] != c) changed = true;
            assignment[i] = c;
            cost += found[i].distance;
        }
        tr.cost.push_back(cost);
        tr.iterations = iter + 1;
        if (!changed) {
            tr.converged = true;
            break;
        }

        // Mean update, summed in index order so worker count never matters.
        DescriptorSet sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[static_cast<std::size_t>(assignment[i])];
            for (std::size_t d = 0; d < dim; ++d) s[d] += data[i][d];
            ++counts[static_cast<std::size_t>(assignment[i])];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
        // Empty clusters take the point farthest from its own center.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto a = static_cast<std::size_t>(assignment[i]);
                if (counts[a] <= 1) continue;
                const double d = rank_distance(m, data[i], centers[a]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --counts[static_cast<std::size_t>(assignment[far])];
            assignment[far] = static_cast<int>(c);
            counts[c] = 1;
            centers[c] = data[far];
        }
    }
    tr.assignment = assignment;
    return Vocabulary(std::move(centers), params.distance_id, Vocabulary::BuiltBy::Kmeans, params.seed);
}

Vocabulary incremental_vocab(const DescriptorSet& descriptors, double threshold, const std::string& distance_id) {
    check_dims(descriptors);
    if (!(threshold >= 0.0)) throw InvalidArgument("incremental vocabulary threshold must be >= 0");
    const Measure m = Measure::parse(distance_id);
    DescriptorSet words;
    for (const auto& raw : descriptors) {
        std::vector<double> x = raw;
        double total = 0.0;
        for (double v : x) total += std::abs(v);
        if (total > 0.0) {
            for (double& v : x) v /= total;
        }
        bool recognized = false;
        for (const auto& w : words) {
            if (m(x, w) <= threshold) {
                recognized = true;
                break;
            }
        }
        if (!recognized) words.push_back(std::move(x));
    }
    return Vocabulary(std::move(words), distance_id, Vocabulary::BuiltBy::Incremental, 0);
}

std::size_t quantize(std::span<const double> x, const Vocabulary& vocab) {
    if (x.size() != vocab.dim()) {
        throw InvalidArgument("descriptor dimension " + std::to_string(x.size()) + " does not match vocabulary " +
                              std::to_string(vocab.dim()));
    }
    return nearest(vocab.measure(), x, vocab.centers()).index;
}

BowVector encode_image(const DescriptorSet& descriptors, const Vocabulary& vocab) {
    if (descriptors.empty()) throw DataError("image has no local features to encode");
    std::vector<double> counts(vocab.size(), 0.0);
    for (const auto& d : descriptors) counts[quantize(d, vocab)] += 1.0;
    const double n = static_cast<double>(descriptors.size());
    for (double& c : counts) c /= n;
    return FeatureHistogram(Binning::bovw(static_cast<int>(vocab.size())), std::move(counts), true);
}

DescriptorSet sample_descriptors(const DescriptorSet& descriptors, std::size_t cap, std::uint64_t seed) {
    if (descriptors.size() <= cap) return descriptors;
    std::vector<std::size_t> idx(descriptors.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < cap; ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    DescriptorSet out;
    out.reserve(cap);
    for (std::size_t i : idx) out.push_back(descriptors[i]);
    return out;
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
    io::write_magic(out, kMagic);
    io::write_le<std::uint32_t>(out, kVersion);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.size()));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.dim()));
    io::write_string(out, vocab.distance_id());
    io::write_le<std::uint64_t>(out, vocab.seed());
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(vocab.built_by()));
    for (const auto& c : vocab.centers()) {
        for (double v : c) io::write_le<float>(out, static_cast<float>(v));
    }
}

Vocabulary read_vocabulary(std::istream& in) {
    io::expect_magic(in, kMagic, "vocabulary");
    const auto version = io::read_le<std::uint32_t>(in);
    if (version != kVersion) throw DataError("unsupported vocabulary version " + std::to_string(version));
    const auto k = io::read_le<std::uint32_t>(in);
    const auto dim = io::read_le<std::uint32_t>(in);
    if (k == 0 || dim == 0 || dim > (1u << 16) || k > (1u << 24)) throw DataError("implausible vocabulary shape");
    std::string distance_id = io::read_string(in, 256);
    const auto seed = io::read_le<std::uint64_t>(in);
    const auto built = io::read_le<std::uint8_t>(in);
    if (built > 1) throw DataError("unknown vocabulary construction method");
    DescriptorSet centers(k, std::vector<double>(dim));
    for (auto& c : centers) {
        for (auto& v : c) v = io::read_le<float>(in);
    }
    try {
        return Vocabulary(std::move(centers), std::move(distance_id), static_cast<Vocabulary::BuiltBy>(built), seed);
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("invalid vocabulary: ") + e.what());
    }
}

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_vocabulary(out, vocab);
    if (!out) throw Error("write failed: " + path.string());
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_vocabulary(in);
}

std::string vocabulary_to_csv(const Vocabulary& vocab) {
    std::string out = "word";
    for (std::size_t d = 0; d < vocab.dim(); ++d) out += ",d" + std::to_string(d);
    out += '\n';
    char buf[32];
    for (std::size_t w = 0; w < vocab.size(); ++w) {
        out += std::to_string(w);
        for (double v : vocab.centers()[w]) {
            std::snprintf(buf, sizeof buf, ",%.9g", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace placeloc
