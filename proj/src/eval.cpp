#include "placeloc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "placeloc/csv.hpp"
#include "placeloc/error.hpp"

namespace placeloc {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

Metrics metrics(std::size_t rr, std::size_t retrieved, std::size_t relevant) {
    if (rr > retrieved || rr > relevant) {
        throw InvalidArgument("relevant_retrieved exceeds retrieved or relevant count");
    }
    Metrics m;
    m.precision = retrieved == 0 ? 0.0 : static_cast<double>(rr) / static_cast<double>(retrieved);
    m.recall = relevant == 0 ? 0.0 : static_cast<double>(rr) / static_cast<double>(relevant);
    const double pr = m.precision + m.recall;
    m.f_measure = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
    m.error_rate = 1.0 - m.recall;
    return m;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t s = 0;
    for (std::size_t r = 0; r < counts.size(); ++r) s += row_sum(r);
    return s;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t s = 0;
    for (std::size_t r = 0; r < counts.size(); ++r) s += counts[r][r];
    return s;
}

std::size_t ConfusionMatrix::row_sum(std::size_t row) const {
    return std::accumulate(counts[row].begin(), counts[row].end(), std::size_t{0});
}

std::size_t ConfusionMatrix::column_sum(std::size_t col) const {
    std::size_t s = 0;
    for (const auto& row : counts) s += row[col];
    return s;
}

ConfusionMatrix confusion_matrix(const std::vector<std::string>& predictions, const std::vector<std::string>& truths,
                                 std::vector<std::string> labels) {
    if (predictions.size() != truths.size()) throw InvalidArgument("predictions and truths differ in length");
    if (labels.empty()) {
        const std::set<std::string> distinct(truths.begin(), truths.end());
        labels.assign(distinct.begin(), distinct.end());
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == kUnknownLabel) throw InvalidArgument("UNKNOWN cannot be a class label");
        if (!index.emplace(labels[i], i).second) throw InvalidArgument("duplicate class label " + labels[i]);
    }
    const std::size_t n = labels.size();
    ConfusionMatrix m{labels, std::vector<std::vector<std::size_t>>(n, std::vector<std::size_t>(n + 1, 0))};
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const auto t = index.find(truths[i]);
        if (t == index.end()) throw InvalidArgument("true label outside the class set: " + truths[i]);
        std::size_t col = n;
        if (predictions[i] != kUnknownLabel) {
            const auto p = index.find(predictions[i]);
            if (p == index.end()) throw InvalidArgument("predicted label outside the class set: " + predictions[i]);
            col = p->second;
        }
        ++m.counts[t->second][col];
    }
    return m;
}

std::vector<PrPoint> pr_curve(const std::vector<std::pair<double, bool>>& scored, ScoreDirection direction,
                              std::optional<std::size_t> total_relevant) {
    if (scored.empty()) throw InvalidArgument("pr_curve needs at least one scored item");
    std::vector<std::pair<double, bool>> items = scored;
    for (const auto& [s, rel] : items) {
        if (!std::isfinite(s)) throw InvalidArgument("pr_curve scores must be finite");
    }
    std::stable_sort(items.begin(), items.end(), [direction](const auto& a, const auto& b) {
        return direction == ScoreDirection::HigherIsBetter ? a.first > b.first : a.first < b.first;
    });
    std::size_t positives = 0;
    for (const auto& it : items) positives += it.second ? 1 : 0;
    const std::size_t relevant = total_relevant.value_or(positives);
    if (relevant < positives) throw InvalidArgument("total_relevant is smaller than the relevant items given");

    std::vector<PrPoint> curve;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        while (j < items.size() && items[j].first == items[i].first) tp += items[j++].second ? 1 : 0;
        const Metrics m = metrics(tp, j, relevant);
        curve.push_back({m.recall, m.precision});
        i = j;
    }
    return curve;
}

double EvalReport::accuracy() const {
    const std::size_t total = confusion.total();
    return total == 0 ? 0.0 : static_cast<double>(confusion.trace()) / static_cast<double>(total);
}

EvalReport summarize(ConfusionMatrix confusion) {
    EvalReport r;
    const std::size_t n = confusion.labels.size();
    for (std::size_t c = 0; c < n; ++c) {
        ClassSummary s;
        s.label = confusion.labels[c];
        s.relevant_retrieved = confusion.counts[c][c];
        s.retrieved = confusion.column_sum(c);
        s.relevant = confusion.row_sum(c);
        s.metrics = metrics(s.relevant_retrieved, s.retrieved, s.relevant);
        r.per_class.push_back(s);
    }
    r.aggregate.label = "ALL";
    r.aggregate.relevant_retrieved = confusion.trace();
    r.aggregate.relevant = confusion.total();
    r.aggregate.retrieved = confusion.total() - (n == 0 ? 0 : confusion.column_sum(n));
    r.aggregate.metrics = metrics(r.aggregate.relevant_retrieved, r.aggregate.retrieved, r.aggregate.relevant);
    r.confusion = std::move(confusion);
    return r;
}

EvalReport evaluate(const std::vector<std::string>& predictions, const std::vector<double>& scores,
                    const std::vector<std::string>& truths, std::vector<std::string> labels) {
    if (scores.size() != predictions.size()) throw InvalidArgument("predictions and scores differ in length");
    EvalReport r = summarize(confusion_matrix(predictions, truths, std::move(labels)));
    std::vector<std::pair<double, bool>> scored;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == kUnknownLabel) continue;
        scored.emplace_back(scores[i], predictions[i] == truths[i]);
    }
    if (!scored.empty()) r.pr_curve = pr_curve(scored, ScoreDirection::HigherIsBetter, truths.size());
    return r;
}

std::string confusion_to_csv(const ConfusionMatrix& m) {
    std::string out = "true\\predicted";
    for (const auto& l : m.labels) out += "," + csv_field(l);
    out += "," + kUnknownLabel + "\n";
    for (std::size_t r = 0; r < m.counts.size(); ++r) {
        out += csv_field(m.labels[r]);
        for (std::size_t v : m.counts[r]) out += "," + std::to_string(v);
        out += '\n';
    }
    return out;
}

ConfusionMatrix confusion_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("confusion csv is empty");
    auto header = parse_csv_line(line);
    if (header.size() < 2 || header.back() != kUnknownLabel) throw DataError("confusion csv header malformed");
    ConfusionMatrix m;
    m.labels.assign(header.begin() + 1, header.end() - 1);
    const std::size_t n = m.labels.size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = parse_csv_line(line);
        if (cells.size() != n + 2) throw DataError("confusion csv row has wrong width");
        if (m.counts.size() >= n || cells[0] != m.labels[m.counts.size()]) {
            throw DataError("confusion csv rows do not follow the column labels");
        }
        std::vector<std::size_t> row;
        for (std::size_t i = 1; i < cells.size(); ++i) {
            try {
                std::size_t used = 0;
                row.push_back(std::stoull(cells[i], &used));
                if (used != cells[i].size()) throw DataError("bad count");
            } catch (const std::logic_error&) {
                throw DataError("confusion csv count is not an integer: " + cells[i]);
            }
        }
        m.counts.push_back(std::move(row));
    }
    if (m.counts.size() != n) throw DataError("confusion csv has " + std::to_string(m.counts.size()) + " rows");
    return m;
}

std::string summary_to_csv(const EvalReport& report) {
    std::string out = "class,relevant_retrieved,retrieved,relevant,precision,recall,f_measure,error_rate\n";
    auto row = [&out](const ClassSummary& s) {
        out += csv_field(s.label) + "," + std::to_string(s.relevant_retrieved) + "," + std::to_string(s.retrieved) + "," +
               std::to_string(s.relevant) + "," + fmt(s.metrics.precision) + "," + fmt(s.metrics.recall) + "," +
               fmt(s.metrics.f_measure) + "," + fmt(s.metrics.error_rate) + "\n";
    };
    for (const auto& s : report.per_class) row(s);
    row(report.aggregate);
    return out;
}

std::string pr_curve_to_csv(const std::vector<PrPoint>& curve) {
    std::string out = "recall,precision\n";
    for (const auto& p : curve) out += fmt(p.recall) + "," + fmt(p.precision) + "\n";
    return out;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create report directory " + dir.string() + ": " + ec.message());
    write_file(dir / "confusion.csv", confusion_to_csv(report.confusion));
    write_file(dir / "pr_curve.csv", pr_curve_to_csv(report.pr_curve));
    write_file(dir / "summary.csv", summary_to_csv(report));
}

}  // namespace placeloc
