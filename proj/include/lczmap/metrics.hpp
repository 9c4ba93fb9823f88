#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "lczmap/labelmap.hpp"

namespace lcz {

/// Class display names in report order; internal ids 0..13 map onto this
/// table.
const std::array<std::string, kClassCount>& class_names();

/// Rows are true classes, columns predicted.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kClassCount>, kClassCount> counts{};

    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t row_sum(int k) const;
    std::uint64_t col_sum(int k) const;
};

ConfusionMatrix confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth);

/// trace/total.
double overall_accuracy(const ConfusionMatrix& cm);

/// Cohen's kappa (p_o - p_e) / (1 - p_e); 0 when p_e degenerates to 1.
/// Computed from integer sums with a single final division, so closed-form
/// cases are exact.
double kappa(const ConfusionMatrix& cm);

struct ClassMetrics {
    double precision = 0.0, recall = 0.0, f1 = 0.0; // 0/0 cases resolve to 0
};

std::array<ClassMetrics, kClassCount> per_class_f1(const ConfusionMatrix& cm);

struct MetricsReport {
    double oa = 0.0;
    double kappa = 0.0;
    std::array<ClassMetrics, kClassCount> classes{};
    ConfusionMatrix matrix;
};

MetricsReport make_report(const ConfusionMatrix& cm);

/// Evaluation output: headline metrics, plus for the pixel baselines the
/// pre-regularization metrics as a secondary block.
struct EvalReport {
    MetricsReport final;
    std::optional<MetricsReport> raw;
};

std::string metrics_to_json(const EvalReport& report);
std::string metrics_to_text(const EvalReport& report);
void save_metrics(const EvalReport& report, const std::string& json_path,
                  const std::string& text_path);

} // namespace lcz
