#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "swarmsim/engine.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/scenario_io.hpp"

namespace swarmsim {

/// Files written for every run, relative to the run directory.
inline const std::vector<std::string>& run_manifest() {
    static const std::vector<std::string> files = {"tasks.csv", "sched_cdf.csv", "exec_cdf.csv",
                                                   "summary.txt"};
    return files;
}

namespace detail {
template <class F>
void write_file(const std::filesystem::path& path, F&& body) {
    auto out = open_for_write(path.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// An empty sample set still yields a header so the file is never blank.
inline void write_cdf_or_header(std::ostream& out, const std::vector<double>& samples) {
    if (samples.empty())
        out << "value,cumulative_fraction\n";
    else
        write_cdf(out, samples);
}
}  // namespace detail

inline void write_run_outputs(const Scenario& s, const RunResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "tasks.csv", [&](std::ostream& o) { write_task_records(o, r.records); });
    detail::write_file(dir / "sched_cdf.csv",
                       [&](std::ostream& o) { detail::write_cdf_or_header(o, r.metrics.scheduling_latency); });
    detail::write_file(dir / "exec_cdf.csv",
                       [&](std::ostream& o) { detail::write_cdf_or_header(o, r.metrics.task_execution); });
    detail::write_file(dir / "summary.txt", [&](std::ostream& o) {
        o << "controller_mode: " << to_string(s.controller_mode) << '\n';
        o << "fleet_size: " << s.fleet_size << '\n';
        o << "seed: " << s.seed << '\n';
        write_summary(o, r.metrics);
    });
}

}  // namespace swarmsim
