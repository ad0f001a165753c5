#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "swarmsim/presets.hpp"

namespace swarmsim {

/// Tasks lost with their holder, among tasks whose fate is known. Tasks still
/// in flight when the run stops are censored, not counted as lost.
inline double lost_fraction(const MetricsReport& m) {
    const auto it = m.incomplete_by_reason.find(std::string(to_string(IncompleteReason::HolderLost)));
    const double lost = it == m.incomplete_by_reason.end() ? 0.0 : static_cast<double>(it->second);
    const double known = lost + static_cast<double>(m.completed);
    return known > 0.0 ? lost / known : 0.0;
}

/// Metrics of every calibration cell for one seed, keyed by cell label.
using CellMetrics = std::map<std::string, MetricsReport>;

struct CalibrationTarget {
    std::string name;
    std::string statistic;
    double reference = 0.0;  // anchor value; NaN for pure ordering targets
    double lo = 0.0;         // accepted interval for the mean over seeds
    double hi = 0.0;
    std::function<double(const CellMetrics&)> measure;

    bool accepts(double v) const { return std::isfinite(v) && v >= lo && v <= hi; }
};

inline const MetricsReport& cell_of(const CellMetrics& m, const std::string& label) {
    const auto it = m.find(label);
    if (it == m.end()) throw std::out_of_range("calibration cell missing: " + label);
    return it->second;
}

inline std::vector<CalibrationTarget> default_targets() {
    const double inf = std::numeric_limits<double>::infinity();
    return {
        {"network_share", "centralized_n1000 controller network fraction", 0.34, 0.24, 0.44,
         [](const CellMetrics& m) { return cell_of(m, "centralized_n1000").network_fraction; }},
        {"incompletion", "distributed_n1000_het_fail lost fraction", 0.18, 0.10, 0.26,
         [](const CellMetrics& m) { return lost_fraction(cell_of(m, "distributed_n1000_het_fail")); }},
        {"elongation", "distributed/centralized mean execution at n1000 het_fail", 1.56, 1.41, 1.71,
         [](const CellMetrics& m) {
             return cell_of(m, "distributed_n1000_het_fail").mean_task_execution /
                    cell_of(m, "centralized_n1000_het_fail").mean_task_execution;
         }},
        {"reschedule_penalty", "centralized n1000 mean scheduling latency het_fail minus het",
         std::numeric_limits<double>::quiet_NaN(), std::nextafter(0.0, 1.0), inf,
         [](const CellMetrics& m) {
             return cell_of(m, "centralized_n1000_het_fail").mean_scheduling_latency -
                    cell_of(m, "centralized_n1000_het").mean_scheduling_latency;
         }},
    };
}

struct TargetResult {
    std::string name;
    std::string statistic;
    std::vector<double> per_seed;
    double value = 0.0;  // mean over seeds
    double reference = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

struct CalibrationReport {
    std::vector<std::uint64_t> seeds;
    std::vector<TargetResult> targets;

    bool all_pass() const {
        for (const auto& t : targets)
            if (!t.pass) return false;
        return true;
    }
};

/// Evaluates targets against per-seed cell metrics.
inline CalibrationReport evaluate_targets(const std::vector<CalibrationTarget>& targets,
                                          const std::map<std::uint64_t, CellMetrics>& by_seed) {
    CalibrationReport report;
    for (const auto& [seed, _] : by_seed) report.seeds.push_back(seed);
    for (const auto& t : targets) {
        TargetResult r{t.name, t.statistic, {}, 0.0, t.reference, t.lo, t.hi, false};
        for (const auto& [seed, cells] : by_seed) r.per_seed.push_back(t.measure(cells));
        r.value = mean(r.per_seed);
        r.pass = !r.per_seed.empty() && t.accepts(r.value);
        report.targets.push_back(std::move(r));
    }
    return report;
}

inline std::map<std::uint64_t, CellMetrics> group_by_seed(const PresetOutcome& outcome) {
    std::map<std::uint64_t, CellMetrics> by_seed;
    for (std::size_t i = 0; i < outcome.runs.size(); ++i)
        by_seed[outcome.runs[i].scenario.seed][outcome.runs[i].cell] = outcome.metrics[i];
    return by_seed;
}

/// Runs the calibration cells on seeds `seed`..`seed+repeats-1` and scores
/// every target. `out` may be empty to skip file output.
inline CalibrationReport run_calibration(const std::vector<CalibrationTarget>& targets,
                                         const std::filesystem::path& out, std::uint64_t seed = 1,
                                         std::size_t repeats = 3) {
    const PresetOutcome outcome = run_preset("calibrate", seed, repeats, out);
    return evaluate_targets(targets, group_by_seed(outcome));
}

inline void write_calibration_report(std::ostream& out, const CalibrationReport& r) {
    out << "target,statistic,value,reference,lo,hi,per_seed,result\n";
    for (const auto& t : r.targets) {
        std::string per_seed;
        for (std::size_t i = 0; i < t.per_seed.size(); ++i) {
            if (i) per_seed += ';';
            per_seed += fmt_num(t.per_seed[i]);
        }
        out << t.name << ',' << t.statistic << ',' << fmt_num(t.value) << ','
            << (std::isnan(t.reference) ? std::string() : fmt_num(t.reference)) << ','
            << fmt_num(t.lo) << ',' << fmt_num(t.hi) << ',' << per_seed << ','
            << (t.pass ? "pass" : "fail") << '\n';
    }
}

}  // namespace swarmsim
