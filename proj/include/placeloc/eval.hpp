#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace placeloc {

/// Label emitted when a classifier declines to name a class.
inline const std::string kUnknownLabel = "UNKNOWN";

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    double error_rate = 1.0;
};

/// P = rr / retrieved (0 when nothing retrieved), R = rr / relevant,
/// F = 2PR / (P + R) (0 when P + R = 0), ER = 1 - R.
Metrics metrics(std::size_t relevant_retrieved, std::size_t retrieved, std::size_t relevant);

/// Rows are true classes, columns are predicted classes followed by UNKNOWN.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const;
    std::size_t trace() const;
    std::size_t row_sum(std::size_t row) const;
    std::size_t column_sum(std::size_t col) const;
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// `labels` defaults to the sorted distinct truths.
ConfusionMatrix confusion_matrix(const std::vector<std::string>& predictions, const std::vector<std::string>& truths,
                                 std::vector<std::string> labels = {});

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
    friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

enum class ScoreDirection { HigherIsBetter, LowerIsBetter };

/// Sweeps a threshold over the distinct scores, best first, and emits one
/// point per threshold. Recall uses `total_relevant` when given, otherwise
/// the number of relevant items in `scored`.
std::vector<PrPoint> pr_curve(const std::vector<std::pair<double, bool>>& scored,
                              ScoreDirection direction = ScoreDirection::HigherIsBetter,
                              std::optional<std::size_t> total_relevant = std::nullopt);

struct ClassSummary {
    std::string label;
    std::size_t relevant_retrieved = 0;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;
    Metrics metrics;
};

struct EvalReport {
    ConfusionMatrix confusion;
    std::vector<ClassSummary> per_class;
    ClassSummary aggregate;  ///< micro-averaged, label "ALL"
    std::vector<PrPoint> pr_curve;

    double accuracy() const;
};

/// Per-class and pooled metrics from a confusion matrix.
EvalReport summarize(ConfusionMatrix confusion);

/// Full report. Each prediction carries a higher-is-better score; the PR
/// curve ranks non-UNKNOWN predictions by it with every item counted as
/// relevant.
EvalReport evaluate(const std::vector<std::string>& predictions, const std::vector<double>& scores,
                    const std::vector<std::string>& truths, std::vector<std::string> labels = {});

/// Writes confusion.csv, pr_curve.csv and summary.csv into `dir`.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

std::string confusion_to_csv(const ConfusionMatrix& m);
ConfusionMatrix confusion_from_csv(const std::string& text);
std::string summary_to_csv(const EvalReport& report);
std::string pr_curve_to_csv(const std::vector<PrPoint>& curve);

}  // namespace placeloc
