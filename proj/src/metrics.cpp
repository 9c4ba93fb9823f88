#include "lczmap/metrics.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lczmap/error.hpp"

namespace lcz {

const std::array<std::string, kClassCount>& class_names() {
    static const std::array<std::string, kClassCount> names = {
        "LCZ 2", "LCZ 3", "LCZ 4", "LCZ 5", "LCZ 8", "LCZ 9", "LCZ 10",
        "LCZ A", "LCZ B", "LCZ C", "LCZ D", "LCZ E", "LCZ F", "LCZ G"};
    return names;
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
        for (std::uint64_t c : row) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (int k = 0; k < kClassCount; ++k) t += counts[k][k];
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(int k) const {
    std::uint64_t t = 0;
    for (std::uint64_t c : counts[k]) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::col_sum(int k) const {
    std::uint64_t t = 0;
    for (int r = 0; r < kClassCount; ++r) t += counts[r][k];
    return t;
}

ConfusionMatrix confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
    require(pred.size() == truth.size(), Errc::invalid,
            "prediction/truth length mismatch in confusion()");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        require(pred[i] < kClassCount && truth[i] < kClassCount, Errc::invalid,
                "label out of range in confusion()");
        ++cm.counts[truth[i]][pred[i]];
    }
    return cm;
}

double overall_accuracy(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    require(total > 0, Errc::invalid, "empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double kappa(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    require(total > 0, Errc::invalid, "empty confusion matrix");
    // kappa = (total*trace - sum_k row_k*col_k) / (total^2 - sum_k row_k*col_k)
    std::uint64_t pe_num = 0;
    for (int k = 0; k < kClassCount; ++k) pe_num += cm.row_sum(k) * cm.col_sum(k);
    const std::uint64_t total_sq = total * total;
    if (pe_num == total_sq) return 0.0; // p_e == 1, degenerate
    const double num = static_cast<double>(total * cm.trace()) - static_cast<double>(pe_num);
    const double den = static_cast<double>(total_sq) - static_cast<double>(pe_num);
    return num / den;
}

std::array<ClassMetrics, kClassCount> per_class_f1(const ConfusionMatrix& cm) {
    require(cm.total() > 0, Errc::invalid, "empty confusion matrix");
    std::array<ClassMetrics, kClassCount> out{};
    for (int k = 0; k < kClassCount; ++k) {
        const std::uint64_t tp = cm.counts[k][k];
        const std::uint64_t fp = cm.col_sum(k) - tp;
        const std::uint64_t fn = cm.row_sum(k) - tp;
        ClassMetrics& m = out[k];
        m.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        // Single division keeps closed-form cases exact (e.g. 8/11).
        m.f1 = (2 * tp + fp + fn) ? static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn)
                                  : 0.0;
    }
    return out;
}

MetricsReport make_report(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.oa = overall_accuracy(cm);
    r.kappa = kappa(cm);
    r.classes = per_class_f1(cm);
    r.matrix = cm;
    return r;
}

namespace {

nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["oa"] = r.oa;
    j["kappa"] = r.kappa;
    j["classes"] = nlohmann::json::array();
    for (int k = 0; k < kClassCount; ++k) {
        j["classes"].push_back({{"name", class_names()[k]},
                                {"precision", r.classes[k].precision},
                                {"recall", r.classes[k].recall},
                                {"f1", r.classes[k].f1}});
    }
    j["matrix"] = nlohmann::json::array();
    for (int t = 0; t < kClassCount; ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (int p = 0; p < kClassCount; ++p) row.push_back(r.matrix.counts[t][p]);
        j["matrix"].push_back(row);
    }
    return j;
}

void report_to_text(std::ostringstream& os, const MetricsReport& r) {
    os << "Class      Precision  Recall     F1\n";
    for (int k = 0; k < kClassCount; ++k) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%-10s %-10.3f %-10.3f %-10.3f\n", class_names()[k].c_str(),
                      r.classes[k].precision, r.classes[k].recall, r.classes[k].f1);
        os << buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "O.A.   %.4f\nKappa  %.4f\n", r.oa, r.kappa);
    os << buf;
}

} // namespace

std::string metrics_to_json(const EvalReport& report) {
    nlohmann::json j = report_to_json(report.final);
    if (report.raw) j["raw"] = report_to_json(*report.raw);
    return j.dump(2) + "\n";
}

std::string metrics_to_text(const EvalReport& report) {
    std::ostringstream os;
    report_to_text(os, report.final);
    if (report.raw) {
        os << "\nBefore spatial regularization:\n";
        report_to_text(os, *report.raw);
    }
    return os.str();
}

void save_metrics(const EvalReport& report, const std::string& json_path,
                  const std::string& text_path) {
    {
        std::ofstream f(json_path);
        require(static_cast<bool>(f), Errc::io, "cannot open metrics JSON for writing: " + json_path);
        f << metrics_to_json(report);
        require(static_cast<bool>(f), Errc::io, "write failed: " + json_path);
    }
    {
        std::ofstream f(text_path);
        require(static_cast<bool>(f), Errc::io, "cannot open metrics text for writing: " + text_path);
        f << metrics_to_text(report);
        require(static_cast<bool>(f), Errc::io, "write failed: " + text_path);
    }
}

} // namespace lcz
