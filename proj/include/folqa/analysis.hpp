#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "folqa/evaluator.hpp"
#include "folqa/generator.hpp"

// Aggregation of evaluation results into reports: Wilson-bounded accuracies,
// step-type distributions, first-error attribution, misleading-step recovery
// histograms, and label-vs-proof-accuracy correlation.

namespace folqa {

enum class Metric { Strict, Skip, Broad, Valid };

constexpr std::array<Metric, 4> kMetrics = {Metric::Strict, Metric::Skip, Metric::Broad, Metric::Valid};

constexpr const char* to_string(Metric m) {
    switch (m) {
        case Metric::Strict: return "strict";
        case Metric::Skip: return "skip";
        case Metric::Broad: return "broad";
        case Metric::Valid: return "valid";
    }
    return "?";
}

inline Metric metric_from(const std::string& s) {
    for (Metric m : kMetrics)
        if (s == to_string(m)) return m;
    throw ConfigError("unknown metric '" + s + "' (expected strict|skip|broad|valid)");
}

inline bool verdict_for(const EvaluationResult& result, Metric metric) {
    switch (metric) {
        case Metric::Strict: return result.verdicts.strict;
        case Metric::Skip: return result.verdicts.skip;
        case Metric::Broad: return result.verdicts.broad;
        case Metric::Valid: return result.verdicts.valid;
    }
    return false;
}

constexpr std::array<StepType, 8> kStepTypes = {
    StepType::Canonical,       StepType::StrictAtomicMisleading, StepType::StrictNonatomicCorrect,
    StepType::StrictNonatomicMisleading, StepType::BroadCorrect, StepType::BroadMisleading,
    StepType::Invalid,         StepType::Unparseable,
};

namespace detail {

inline bool is_restatement(const StepRecord& step) {
    return step.provability.ok() && step.provability.k == 0 && !step.provability.via_graph;
}

}  // namespace detail

// Earliest step that is neither canonical nor a restatement of an earlier
// conclusion; absent when the whole prediction is canonical.
inline std::optional<StepType> first_error(const EvaluationResult& result) {
    for (const auto& step : result.steps) {
        if (step.type == StepType::Canonical) continue;
        if (detail::is_restatement(step)) continue;
        return step.type;
    }
    return std::nullopt;
}

// For each strictly-valid atomic misleading step, the number of steps until
// the prediction states a gold conclusion again; nullopt when it never does.
inline std::vector<std::optional<int>> recovery_lengths(const EvaluationResult& result) {
    std::vector<std::optional<int>> out;
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        if (result.steps[i].type != StepType::StrictAtomicMisleading) continue;
        std::optional<int> length;
        for (std::size_t j = i + 1; j < result.steps.size(); ++j) {
            if (result.steps[j].in_gold) {
                length = static_cast<int>(j - i);
                break;
            }
        }
        out.push_back(length);
    }
    return out;
}

struct Accuracy {
    double value = 0.0;
    double low = 0.0;
    double high = 1.0;

    bool operator==(const Accuracy&) const = default;
};

struct CellKey {
    Flavor flavor = Flavor::Fictional;
    int num_hops = 1;
    Ordering ordering = Ordering::BottomUp;
    std::string model = "scripted";

    bool operator==(const CellKey&) const = default;

    std::string name() const {
        return to_string(flavor) + "_" + std::to_string(num_hops) + "hop_" + to_string(ordering);
    }
};

struct ResultRow {
    bool skipped = false;
    EvaluationResult eval;
};

struct ExperimentReport {
    CellKey cell;
    int n_total = 0;
    int n_effective = 0;
    int n_skipped = 0;
    double confidence = 0.95;
    Accuracy label_accuracy;
    std::map<Metric, Accuracy> proof_accuracy;
    std::map<StepType, int> step_counts;
    std::map<StepType, int> first_error_counts;
    Metric first_error_metric = Metric::Valid;
    std::map<int, int> recovery_histogram;
    int recovery_overflow = 0;

    bool operator==(const ExperimentReport&) const = default;
};

inline Accuracy accuracy_of(int successes, int trials, double confidence) {
    Interval iv = wilson_interval(static_cast<std::uint64_t>(successes), static_cast<std::uint64_t>(trials),
                                  confidence);
    return {static_cast<double>(successes) / trials, iv.low, iv.high};
}

// Fold one experiment cell's rows into a report. Skipped (over-limit) rows
// are counted and excluded from every accuracy.
inline ExperimentReport aggregate(const std::vector<ResultRow>& rows, const CellKey& cell,
                                  double confidence = 0.95, Metric first_error_metric = Metric::Valid) {
    if (rows.empty()) throw std::invalid_argument("aggregate: no results");
    ExperimentReport report;
    report.cell = cell;
    report.confidence = confidence;
    report.first_error_metric = first_error_metric;
    report.n_total = static_cast<int>(rows.size());
    for (StepType t : kStepTypes) {
        report.step_counts[t] = 0;
        report.first_error_counts[t] = 0;
    }

    int label_hits = 0;
    std::map<Metric, int> proof_hits;
    for (const auto& row : rows) {
        if (row.skipped) {
            ++report.n_skipped;
            continue;
        }
        ++report.n_effective;
        label_hits += row.eval.label_correct ? 1 : 0;
        for (Metric m : kMetrics) proof_hits[m] += verdict_for(row.eval, m) ? 1 : 0;
        for (const auto& step : row.eval.steps) ++report.step_counts[step.type];
        if (!verdict_for(row.eval, first_error_metric)) {
            if (auto error = first_error(row.eval)) ++report.first_error_counts[*error];
        }
        for (const auto& length : recovery_lengths(row.eval)) {
            if (length)
                ++report.recovery_histogram[*length];
            else
                ++report.recovery_overflow;
        }
    }
    if (report.n_effective == 0) throw std::invalid_argument("aggregate: every result was skipped");

    report.label_accuracy = accuracy_of(label_hits, report.n_effective, confidence);
    for (Metric m : kMetrics)
        report.proof_accuracy[m] = accuracy_of(proof_hits[m], report.n_effective, confidence);
    return report;
}

// --- correlation -------------------------------------------------------------

inline std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // zero variance: undefined
    return sxy / std::sqrt(sxx * syy);
}

struct CorrelationSeries {
    std::vector<std::pair<double, double>> points;  // (label accuracy, proof accuracy)
    std::optional<double> r;
};

inline std::map<Metric, CorrelationSeries> correlate(const std::vector<ExperimentReport>& reports) {
    if (reports.size() < 2) throw std::invalid_argument("correlate: need at least two reports");
    std::map<Metric, CorrelationSeries> out;
    for (Metric m : kMetrics) {
        CorrelationSeries series;
        std::vector<double> xs, ys;
        for (const auto& report : reports) {
            double x = report.label_accuracy.value;
            double y = report.proof_accuracy.at(m).value;
            series.points.emplace_back(x, y);
            xs.push_back(x);
            ys.push_back(y);
        }
        series.r = pearson(xs, ys);
        out[m] = std::move(series);
    }
    return out;
}

// --- serialization -----------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline json report_to_json(const ExperimentReport& r) {
    json proof = json::object();
    for (Metric m : kMetrics) {
        const Accuracy& a = r.proof_accuracy.at(m);
        proof[to_string(m)] = {{"value", a.value}, {"low", a.low}, {"high", a.high}};
    }
    json steps = json::object(), first = json::object();
    for (StepType t : kStepTypes) {
        steps[to_string(t)] = r.step_counts.at(t);
        first[to_string(t)] = r.first_error_counts.at(t);
    }
    json recovery = json::object();
    for (const auto& [bucket, count] : r.recovery_histogram) recovery[std::to_string(bucket)] = count;
    return {{"cell",
             {{"flavor", to_string(r.cell.flavor)},
              {"num_hops", r.cell.num_hops},
              {"ordering", to_string(r.cell.ordering)},
              {"model", r.cell.model}}},
            {"n", r.n_total},
            {"effective_n", r.n_effective},
            {"skipped", r.n_skipped},
            {"confidence", r.confidence},
            {"label_accuracy",
             {{"value", r.label_accuracy.value}, {"low", r.label_accuracy.low}, {"high", r.label_accuracy.high}}},
            {"proof_accuracy", proof},
            {"step_counts", steps},
            {"first_error_metric", to_string(r.first_error_metric)},
            {"first_error_counts", first},
            {"recovery_histogram", recovery},
            {"recovery_overflow", r.recovery_overflow}};
}

inline void write_report_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    out << "flavor,hops,ordering,model,n,effective_n,skipped,label_acc,label_low,label_high";
    for (Metric m : kMetrics)
        out << "," << to_string(m) << "_acc," << to_string(m) << "_low," << to_string(m) << "_high";
    for (StepType t : kStepTypes) out << "," << to_string(t);
    out << "\n";
    for (const auto& r : reports) {
        out << to_string(r.cell.flavor) << "," << r.cell.num_hops << "," << to_string(r.cell.ordering) << ","
            << r.cell.model << "," << r.n_total << "," << r.n_effective << "," << r.n_skipped;
        out << "," << detail::fmt_double(r.label_accuracy.value) << "," << detail::fmt_double(r.label_accuracy.low)
            << "," << detail::fmt_double(r.label_accuracy.high);
        for (Metric m : kMetrics) {
            const Accuracy& a = r.proof_accuracy.at(m);
            out << "," << detail::fmt_double(a.value) << "," << detail::fmt_double(a.low) << ","
                << detail::fmt_double(a.high);
        }
        for (StepType t : kStepTypes) out << "," << r.step_counts.at(t);
        out << "\n";
    }
}

inline void write_first_error_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    out << "flavor,hops,ordering,model,step_type,count\n";
    for (const auto& r : reports)
        for (StepType t : kStepTypes)
            out << to_string(r.cell.flavor) << "," << r.cell.num_hops << "," << to_string(r.cell.ordering) << ","
                << r.cell.model << "," << to_string(t) << "," << r.first_error_counts.at(t) << "\n";
}

inline void write_recovery_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    out << "flavor,hops,ordering,model,bucket,count\n";
    for (const auto& r : reports) {
        std::string prefix = to_string(r.cell.flavor) + "," + std::to_string(r.cell.num_hops) + "," +
                             to_string(r.cell.ordering) + "," + r.cell.model;
        for (const auto& [bucket, count] : r.recovery_histogram)
            out << prefix << "," << bucket << "," << count << "\n";
        out << prefix << ",overflow," << r.recovery_overflow << "\n";
    }
}

inline void write_scatter_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    out << "metric,flavor,hops,ordering,model,label_accuracy,proof_accuracy\n";
    for (Metric m : kMetrics)
        for (const auto& r : reports)
            out << to_string(m) << "," << to_string(r.cell.flavor) << "," << r.cell.num_hops << ","
                << to_string(r.cell.ordering) << "," << r.cell.model << ","
                << detail::fmt_double(r.label_accuracy.value) << ","
                << detail::fmt_double(r.proof_accuracy.at(m).value) << "\n";
}

}  // namespace folqa
