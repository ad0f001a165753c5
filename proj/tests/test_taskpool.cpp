#include <gtest/gtest.h>

#include "swarmsim/taskpool.hpp"

using namespace swarmsim;

namespace {

TaskSpec task(TaskId id) {
    TaskSpec t;
    t.id = id;
    t.arrival_time = static_cast<double>(id);
    return t;
}

TaskPool pool_with(std::initializer_list<TaskId> ids) {
    TaskPool p;
    for (TaskId id : ids) p.enqueue(task(id));
    return p;
}

std::vector<TaskId> snapshot_ids(const TaskPool& p, std::size_t limit) {
    std::vector<TaskId> ids;
    for (const auto& v : p.snapshot_pending(limit)) ids.push_back(v.spec->id);
    return ids;
}

void claim_and_start(TaskPool& p, TaskId id, DroneId d) {
    ASSERT_TRUE(p.claim(id, d, p.status_of(id).version, 0.0).won);
    p.start_execution(id, d, 0.0);
}

}  // namespace

TEST(Enqueue, RejectsOutOfOrderIds) {
    TaskPool p;
    p.enqueue(task(3));
    EXPECT_THROW(p.enqueue(task(1)), InvariantViolation);
    EXPECT_THROW(p.enqueue(task(3)), InvariantViolation);
}

TEST(Enqueue, SingleTask) {
    auto p = pool_with({4});
    EXPECT_EQ(snapshot_ids(p, 10), std::vector<TaskId>{4});
}

TEST(Enqueue, ThousandTasksAscending) {
    TaskPool p;
    for (TaskId i = 0; i < 1000; ++i) p.enqueue(task(i));
    const auto ids = snapshot_ids(p, 5000);
    ASSERT_EQ(ids.size(), 1000u);
    EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
}

TEST(Snapshot, EmptyPool) { EXPECT_TRUE(TaskPool{}.snapshot_pending(10).empty()); }

TEST(Snapshot, SkipsNonPending) {
    auto p = pool_with({1, 2, 3});
    ASSERT_TRUE(p.claim(2, 0, 0, 0.0).won);
    EXPECT_EQ(snapshot_ids(p, 10), (std::vector<TaskId>{1, 3}));
}

TEST(Snapshot, FifoPrefix) {
    auto p = pool_with({1, 2, 3, 4, 5});
    EXPECT_EQ(snapshot_ids(p, 2), (std::vector<TaskId>{1, 2}));
}

TEST(Claim, SingleClaimWins) {
    auto p = pool_with({1});
    const auto out = p.claim(1, 9, 0, 1.5);
    EXPECT_TRUE(out.won);
    const auto* c = std::get_if<status::Claimed>(&p.status_of(1).state);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->drone, 9u);
    EXPECT_EQ(c->at, 1.5);
    EXPECT_EQ(p.status_of(1).version, 1u);
}

TEST(Claim, SameInstantLowerDroneWins) {
    auto p = pool_with({1});
    const auto out = p.claim_batch({{1, 7, 0, 2.0}, {1, 3, 0, 2.0}});
    // outcomes follow serialized order: drone 3 first
    ASSERT_EQ(out.size(), 2u);
    EXPECT_TRUE(out[0].won);
    EXPECT_FALSE(out[1].won);
    EXPECT_EQ(p.status_of(1).holder(), 3u);
}

TEST(Claim, StaleVersionAfterRequeueLoses) {
    auto p = pool_with({1});
    const auto before = p.status_of(1).version;
    claim_and_start(p, 1, 2);
    p.requeue(1, 5.0);
    EXPECT_TRUE(p.status_of(1).pending());
    const auto out = p.claim(1, 4, before, 6.0);
    EXPECT_FALSE(out.won);
    EXPECT_EQ(out.current, StatusTag::Pending);
    EXPECT_TRUE(p.claim(1, 4, p.status_of(1).version, 6.0).won);
}

TEST(Claim, UnknownTaskAborts) {
    TaskPool p;
    EXPECT_THROW(p.claim(42, 0, 0, 0.0), InvariantViolation);
}

TEST(Requeue, RegainsIdPosition) {
    auto p = pool_with({3, 5, 9});
    claim_and_start(p, 5, 1);
    EXPECT_EQ(snapshot_ids(p, 10), (std::vector<TaskId>{3, 9}));
    p.requeue(5, 1.0);
    EXPECT_EQ(snapshot_ids(p, 10), (std::vector<TaskId>{3, 5, 9}));
    EXPECT_EQ(p.status_of(5).reschedule_count, 1u);
    EXPECT_EQ(p.counters().requeues, 1u);
}

TEST(Requeue, DoubleRequeueAborts) {
    auto p = pool_with({1});
    claim_and_start(p, 1, 0);
    p.requeue(1, 1.0);
    EXPECT_THROW(p.requeue(1, 2.0), InvariantViolation);
}

TEST(Complete, RecordsFinishTime) {
    auto p = pool_with({1});
    claim_and_start(p, 1, 0);
    p.complete(1, 0, 12.0);
    const auto* c = std::get_if<status::Completed>(&p.status_of(1).state);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->at, 12.0);
    EXPECT_TRUE(p.status_of(1).terminal());
}

TEST(Complete, OldHolderAfterRequeueAborts) {
    auto p = pool_with({1});
    claim_and_start(p, 1, 0);
    p.requeue(1, 1.0);
    claim_and_start(p, 1, 5);
    EXPECT_THROW(p.complete(1, 0, 2.0), InvariantViolation);
}

TEST(Counters, ConflictsPlusClaimsEqualAttempts) {
    TaskPool p;
    for (TaskId i = 0; i < 100; ++i) p.enqueue(task(i));
    std::uint64_t completions = 0;
    for (TaskId i = 0; i < 100; ++i) {
        const auto v = p.status_of(i).version;
        for (DroneId d = 0; d < 3; ++d) p.claim(i, d, v, static_cast<double>(i));
        if (i % 2 == 0) {
            p.start_execution(i, 0, 0.0);
            p.complete(i, 0, 1.0);
            ++completions;
        }
    }
    const auto& c = p.counters();
    EXPECT_EQ(c.attempts, 300u);
    EXPECT_EQ(c.claims, 100u);
    EXPECT_EQ(c.conflicts + c.claims, c.attempts);
    EXPECT_GE(c.claims, completions);
}

TEST(Listener, SeesEveryTransitionWithMonotoneVersions) {
    auto p = pool_with({1});
    std::vector<Transition> seen;
    p.set_listener([&](const Transition& t) { seen.push_back(t); });
    claim_and_start(p, 1, 0);
    p.requeue(1, 1.0);
    claim_and_start(p, 1, 1);
    p.complete(1, 1, 2.0);
    ASSERT_EQ(seen.size(), 6u);
    for (std::size_t i = 0; i < seen.size(); ++i) {
        EXPECT_EQ(seen[i].version, i + 1);
        if (i) {
            EXPECT_EQ(seen[i].from, seen[i - 1].to);
        }
        EXPECT_TRUE(legal_transition(seen[i].from, seen[i].to));
    }
}

TEST(Incomplete, PendingOnlyAtRunEnd) {
    auto p = pool_with({1, 2});
    EXPECT_THROW(p.mark_incomplete(1, IncompleteReason::RunEnd, 5.0, false), InvariantViolation);
    p.mark_incomplete(1, IncompleteReason::Unassignable, 5.0, true);
    claim_and_start(p, 2, 0);
    p.mark_incomplete(2, IncompleteReason::HolderLost, 5.0, false);
    EXPECT_TRUE(p.status_of(1).terminal());
    EXPECT_TRUE(p.status_of(2).terminal());
    EXPECT_EQ(p.pending_count(), 0u);
}
