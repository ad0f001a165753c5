#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "swarmsim/engine.hpp"
#include "swarmsim/output.hpp"

namespace swarmsim {

inline const std::vector<std::size_t>& fleet_ladder() {
    static const std::vector<std::size_t> ladder = {12, 100, 500, 1000, 2000, 5000, 10000};
    return ladder;
}

inline Scenario make_scenario(ControllerMode mode, std::size_t fleet, std::uint64_t seed) {
    Scenario s;
    s.controller_mode = mode;
    s.fleet_size = fleet;
    s.seed = seed;
    return s;
}

inline Scenario with_heterogeneity(Scenario s, bool failures) {
    s.heterogeneity.enabled = true;
    s.failures.enabled = failures;
    return s;
}

inline Scenario with_whatif(Scenario s, double net_multiplier, std::size_t agents) {
    s.net_latency_multiplier = net_multiplier;
    s.scheduler_agents = agents;
    return s;
}

/// One grid point of a preset; repeats differ only in seed.
struct PresetCell {
    std::string label;
    Scenario scenario;
};

struct PresetRun {
    std::string cell;
    std::size_t repeat = 0;
    Scenario scenario;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "calibrate"};
    return names;
}

inline std::string mode_label(ControllerMode m) { return std::string(to_string(m)); }

/// Cells of a figure preset at `seed`; empty for unknown names.
inline std::vector<PresetCell> preset_cells(const std::string& name, std::uint64_t seed) {
    std::vector<PresetCell> cells;
    const auto modes = {ControllerMode::Centralized, ControllerMode::Distributed};
    if (name == "fig2") {
        for (auto m : modes)
            for (std::size_t n : {12u, 1000u})
                cells.push_back({fmt::format("{}_n{}", mode_label(m), n), make_scenario(m, n, seed)});
    } else if (name == "fig3") {
        for (std::size_t n : fleet_ladder())
            cells.push_back({fmt::format("n{}", n), make_scenario(ControllerMode::Centralized, n, seed)});
    } else if (name == "fig4") {
        for (auto m : modes)
            for (std::size_t n : {12u, 1000u})
                for (bool failures : {false, true})
                    cells.push_back({fmt::format("{}_n{}_{}", mode_label(m), n, failures ? "het_fail" : "het"),
                                     with_heterogeneity(make_scenario(m, n, seed), failures)});
    } else if (name == "fig5") {
        for (double mult : {1.0, 0.5, 0.25})
            for (std::size_t k : {1u, 2u, 4u, 8u})
                cells.push_back({fmt::format("m{}_k{}", mult, k),
                                 with_whatif(make_scenario(ControllerMode::Centralized, 1000, seed), mult, k)});
    } else if (name == "calibrate") {
        const auto c = ControllerMode::Centralized;
        const auto d = ControllerMode::Distributed;
        cells.push_back({"centralized_n1000", make_scenario(c, 1000, seed)});
        cells.push_back({"centralized_n1000_het", with_heterogeneity(make_scenario(c, 1000, seed), false)});
        cells.push_back({"centralized_n1000_het_fail", with_heterogeneity(make_scenario(c, 1000, seed), true)});
        cells.push_back({"distributed_n1000_het_fail", with_heterogeneity(make_scenario(d, 1000, seed), true)});
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return cells;
}

/// Every run of a preset: each cell with seeds seed, seed+1, ... .
inline std::vector<PresetRun> preset_runs(const std::string& name, std::uint64_t seed, std::size_t repeats) {
    std::vector<PresetRun> runs;
    for (std::size_t r = 0; r < repeats; ++r)
        for (auto& cell : preset_cells(name, seed + r))
            runs.push_back({cell.label, r, std::move(cell.scenario)});
    return runs;
}

/// Worker count from SWARMSIM_WORKERS, else the hardware thread count.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("SWARMSIM_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Applies `job(i)` to 0..n-1 over a fixed pool; the first exception wins.
template <class Job>
void parallel_for(std::size_t n, std::size_t workers, Job&& job) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct CellSummary {
    std::string cell;
    std::size_t runs = 0;
    std::vector<double> scheduling_latency;  // pooled over repeats
    std::vector<double> task_execution;
    double mean_incomplete_fraction = 0.0;
    double mean_completion_fraction = 0.0;
    double mean_network_fraction = 0.0;
    double mean_conflict_rate = 0.0;
};

struct PresetOutcome {
    std::vector<PresetRun> runs;
    std::vector<MetricsReport> metrics;  // parallel to runs
    std::vector<CellSummary> cells;      // first-appearance order
};

inline std::vector<CellSummary> summarize_cells(const std::vector<PresetRun>& runs,
                                                const std::vector<MetricsReport>& metrics) {
    std::vector<CellSummary> cells;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        auto [it, fresh] = index.try_emplace(runs[i].cell, cells.size());
        if (fresh) {
            cells.emplace_back();
            cells.back().cell = runs[i].cell;
        }
        CellSummary& c = cells[it->second];
        const MetricsReport& m = metrics[i];
        ++c.runs;
        c.scheduling_latency.insert(c.scheduling_latency.end(), m.scheduling_latency.begin(),
                                    m.scheduling_latency.end());
        c.task_execution.insert(c.task_execution.end(), m.task_execution.begin(), m.task_execution.end());
        c.mean_incomplete_fraction += m.incomplete_fraction;
        c.mean_completion_fraction += m.completion_fraction;
        c.mean_network_fraction += m.network_fraction;
        c.mean_conflict_rate += m.conflict_rate;
    }
    for (auto& c : cells) {
        const auto n = static_cast<double>(c.runs);
        c.mean_incomplete_fraction /= n;
        c.mean_completion_fraction /= n;
        c.mean_network_fraction /= n;
        c.mean_conflict_rate /= n;
    }
    return cells;
}

inline void write_cell_summary(std::ostream& out, const std::vector<CellSummary>& cells) {
    out << "cell,runs,sched_samples,sched_mean,sched_p50,sched_p90,sched_p95,sched_p99,"
           "exec_samples,exec_mean,exec_p50,exec_p90,exec_p95,exec_p99,"
           "completion_fraction,incomplete_fraction,network_fraction,conflict_rate\n";
    auto pct = [&](const std::vector<double>& v) {
        const auto p = summarize(v);
        if (!p) return std::string(",,,");
        return fmt_num(p->p50) + ',' + fmt_num(p->p90) + ',' + fmt_num(p->p95) + ',' + fmt_num(p->p99);
    };
    for (const auto& c : cells) {
        out << c.cell << ',' << c.runs << ',' << c.scheduling_latency.size() << ','
            << fmt_num(mean(c.scheduling_latency)) << ',' << pct(c.scheduling_latency) << ','
            << c.task_execution.size() << ',' << fmt_num(mean(c.task_execution)) << ','
            << pct(c.task_execution) << ',' << fmt_num(c.mean_completion_fraction) << ','
            << fmt_num(c.mean_incomplete_fraction) << ',' << fmt_num(c.mean_network_fraction) << ','
            << fmt_num(c.mean_conflict_rate) << '\n';
    }
}

/// Runs every scenario of a preset, writes per-run outputs under
/// `out/<cell>/seed_<n>/` plus the combined tables, and returns the metrics.
/// An empty `out` skips all file output.
inline PresetOutcome run_preset(const std::string& name, std::uint64_t seed, std::size_t repeats,
                                const std::filesystem::path& out, std::size_t workers = worker_count()) {
    PresetOutcome result;
    result.runs = preset_runs(name, seed, repeats);
    if (result.runs.empty()) throw std::invalid_argument("unknown preset '" + name + "'");
    result.metrics.resize(result.runs.size());
    parallel_for(result.runs.size(), workers, [&](std::size_t i) {
        const PresetRun& run = result.runs[i];
        RunResult r = swarmsim::run(run.scenario, {TraceLevel::Off, {}});
        if (!out.empty())
            write_run_outputs(run.scenario, r, out / run.cell / fmt::format("seed_{}", run.scenario.seed));
        result.metrics[i] = std::move(r.metrics);
    });
    result.cells = summarize_cells(result.runs, result.metrics);
    if (out.empty()) return result;

    detail::write_file(out / "combined.csv", [&](std::ostream& o) {
        o << "cell,seed,metric,value\n";
        for (std::size_t i = 0; i < result.runs.size(); ++i) {
            const auto& cell = result.runs[i].cell;
            const auto seed_i = result.runs[i].scenario.seed;
            for (double v : result.metrics[i].scheduling_latency)
                o << cell << ',' << seed_i << ",scheduling_latency," << fmt_num(v) << '\n';
            for (double v : result.metrics[i].task_execution)
                o << cell << ',' << seed_i << ",task_execution," << fmt_num(v) << '\n';
        }
    });
    std::vector<LabeledSamples> sched, exec;
    for (const auto& c : result.cells) {
        sched.push_back({c.cell, c.scheduling_latency});
        exec.push_back({c.cell, c.task_execution});
    }
    detail::write_file(out / "violin_sched.csv", [&](std::ostream& o) { write_violin(o, sched); });
    detail::write_file(out / "violin_exec.csv", [&](std::ostream& o) { write_violin(o, exec); });
    detail::write_file(out / "summary.csv", [&](std::ostream& o) { write_cell_summary(o, result.cells); });
    return result;
}

}  // namespace swarmsim
