#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "swarmsim/engine.hpp"
#include "swarmsim/metrics.hpp"

using namespace swarmsim;

TEST(Percentile, NearestRank) {
    EXPECT_EQ(percentile({1, 2, 3, 4}, 0.5), 2.0);
    EXPECT_EQ(percentile({4, 3, 2, 1}, 0.75), 3.0);
    EXPECT_EQ(percentile({4, 3, 2, 1}, 0.0), 1.0);
}

TEST(Percentile, Singleton) {
    for (double p : {0.0, 0.3, 0.99, 1.0}) EXPECT_EQ(percentile({7}, p), 7.0);
}

TEST(Percentile, Constant) {
    std::vector<double> s(1000, 5.0);
    for (double p : {0.0, 0.5, 0.9, 0.95, 0.99, 1.0}) EXPECT_EQ(percentile(s, p), 5.0);
}

TEST(Percentile, EmptyIsAbsent) {
    EXPECT_FALSE(percentile({}, 0.5).has_value());
    EXPECT_FALSE(summarize({}).has_value());
}

TEST(Percentile, RejectsOutOfRange) { EXPECT_THROW(percentile({1.0}, 1.5), std::invalid_argument); }

TEST(Percentile, MonotoneWithMaxAndMin) {
    std::mt19937_64 g(1);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> s(777);
    for (auto& x : s) x = e(g);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = *percentile(s, i / 100.0);
        EXPECT_GE(v, prev);
        prev = v;
    }
    EXPECT_EQ(*percentile(s, 1.0), *std::max_element(s.begin(), s.end()));
    EXPECT_EQ(*percentile(s, 1e-9), *std::min_element(s.begin(), s.end()));
}

TEST(Cdf, TwoSamples) {
    std::ostringstream out;
    write_cdf(out, {2, 1});
    EXPECT_EQ(out.str(), "value,cumulative_fraction\n1,0.5\n2,1\n");
}

TEST(Cdf, ManySamplesStrictlyIncreasing) {
    std::vector<double> s(100'000);
    std::mt19937_64 g(2);
    for (auto& x : s) x = static_cast<double>(g() % 1000);
    std::ostringstream out;
    write_cdf(out, s);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    double prev = 0.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const double frac = std::stod(line.substr(line.find(',') + 1));
        EXPECT_GT(frac, prev);
        prev = frac;
        ++rows;
    }
    EXPECT_EQ(rows, 100'000u);
    EXPECT_EQ(prev, 1.0);
}

TEST(Cdf, ReexportIsIdentical) {
    std::vector<double> s = {0.1, 0.25, 3.5, 1e-7, 12345.678};
    std::ostringstream a, b;
    write_cdf(a, s);
    write_cdf(b, s);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Cdf, EmptyRejected) {
    std::ostringstream out;
    EXPECT_THROW(write_cdf(out, {}), std::invalid_argument);
}

TEST(Violin, RowsGroupedByLabelInOrder) {
    std::ostringstream out;
    write_violin(out, {{"b", {1, 2, 3}}, {"a", {4, 5, 6}}});
    EXPECT_EQ(out.str(), "label,value\nb,1\nb,2\nb,3\na,4\na,5\na,6\n");
}

TEST(Violin, EmptyLabelSetRejected) {
    std::ostringstream out;
    EXPECT_THROW(write_violin(out, {}), std::invalid_argument);
}

TEST(Bimodality, Fractions) {
    EXPECT_EQ(bimodality_fraction({1, 2, 3}, 10.0), 0.0);
    EXPECT_EQ(bimodality_fraction({1, 2, 30, 40}, 10.0), 0.5);
    EXPECT_THROW(bimodality_fraction({1.0}, 0.0), std::invalid_argument);
}

namespace {
TaskRecord record(TaskId id, double arrival, std::optional<double> assign, std::optional<double> done,
                  Outcome outcome, std::optional<IncompleteReason> reason = std::nullopt) {
    TaskRecord r;
    r.id = id;
    r.arrival_time = arrival;
    if (assign) {
        r.eligible_time = arrival;
        r.first_assign_time = assign;
        r.final_assign_time = assign;
    }
    r.completion_time = done;
    r.outcome = outcome;
    r.reason = reason;
    return r;
}
}  // namespace

TEST(BuildMetrics, FractionsSumToOne) {
    std::vector<TaskRecord> rs = {
        record(0, 0, 1, 5, Outcome::Completed),
        record(1, 0, 2, 9, Outcome::Completed),
        record(2, 0, 3, std::nullopt, Outcome::Incomplete, IncompleteReason::HolderLost),
        record(3, 0, std::nullopt, std::nullopt, Outcome::Incomplete, IncompleteReason::RunEnd),
    };
    const auto m = detail::build_metrics(rs, {}, 10.0, 0.0);
    EXPECT_DOUBLE_EQ(m.completion_fraction + m.incomplete_fraction + m.residual_pending_fraction, 1.0);
    EXPECT_EQ(m.scheduling_latency.size(), 3u);
    EXPECT_EQ(m.task_execution, (std::vector<double>{4, 7}));
    EXPECT_EQ(m.incomplete_by_reason.at("holder_lost"), 1u);
    EXPECT_EQ(m.incomplete_by_reason.at("run_end"), 1u);
}

TEST(BuildMetrics, WarmupDropsEarlyLatencySamplesOnly) {
    std::vector<TaskRecord> rs = {
        record(0, 0, 1, 5, Outcome::Completed),
        record(1, 0, 70, 90, Outcome::Completed),
    };
    const auto m = detail::build_metrics(rs, {}, 600.0, 60.0);
    EXPECT_EQ(m.scheduling_latency, std::vector<double>{70});
    EXPECT_EQ(m.task_execution.size(), 2u);
}

TEST(TaskRecordLatency, IncludesRescheduleWait) {
    TaskRecord r = record(0, 10, 12, std::nullopt, Outcome::Open);
    r.reschedule_wait = 4.0;
    EXPECT_DOUBLE_EQ(*r.scheduling_latency(), 6.0);
}

TEST(Summary, FixedKeys) {
    MetricsReport m;
    std::ostringstream out;
    write_summary(out, m);
    const auto s = out.str();
    for (const char* key : {"total_tasks:", "completion_fraction:", "conflict_rate:", "requeues:",
                            "controller_network_fraction:", "scheduling_latency_p99: absent",
                            "task_execution_p50: absent", "assignment_throughput_per_s:"})
        EXPECT_NE(s.find(key), std::string::npos) << key;
}
