#include <gtest/gtest.h>

#include <random>

#include "swarmsim/models.hpp"
#include "swarmsim/scenario.hpp"

using namespace swarmsim;

namespace {

TaskSpec recognize_people(double work, Position at = {}) {
    TaskSpec t;
    t.kind = TaskKind::RecognizePeople;
    t.required_sensors = required_sensors(t.kind);
    t.compute_work = work;
    t.payload_bytes = 500'000.0;
    t.location = at;
    return t;
}

DroneState drone_at(Position p, double battery = 1e9) {
    DroneState d;
    d.position = p;
    d.battery_capacity = battery;
    d.battery_level = battery;
    return d;
}

}  // namespace

TEST(Distance, IdentityIsZero) { EXPECT_EQ(distance({0, 0, 0}, {0, 0, 0}), 0.0); }

TEST(Distance, ThreeFourFive) { EXPECT_DOUBLE_EQ(distance({0, 0, 0}, {30, 40, 0}), 50.0); }

TEST(Distance, DiagonalOfOneTwoTwo) { EXPECT_DOUBLE_EQ(distance({1, 2, 2}, {0, 0, 0}), 3.0); }

TEST(Distance, SymmetricAndTriangleInequality) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
        Position a{u(gen), u(gen), std::abs(u(gen))};
        Position b{u(gen), u(gen), std::abs(u(gen))};
        Position c{u(gen), u(gen), std::abs(u(gen))};
        EXPECT_DOUBLE_EQ(distance(a, b), distance(b, a));
        EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-9);
    }
}

TEST(Sensors, EachKindNeedsItsSensor) {
    EXPECT_EQ(required_sensors(TaskKind::Routing), SensorSet({SensorKind::Gps}));
    EXPECT_EQ(required_sensors(TaskKind::ObstacleAvoidance), SensorSet({SensorKind::Rangefinder}));
    EXPECT_EQ(required_sensors(TaskKind::RecognizePeople), SensorSet({SensorKind::CameraPeople}));
    EXPECT_EQ(required_sensors(TaskKind::RecognizeBuilding), SensorSet({SensorKind::CameraBuilding}));
    EXPECT_EQ(required_sensors(TaskKind::RecognizeTree), SensorSet({SensorKind::CameraTree}));
    EXPECT_EQ(required_sensors(TaskKind::RecognizeDrone), SensorSet({SensorKind::CameraDrone}));
}

TEST(TaskKindNames, RoundTrip) {
    for (std::size_t i = 0; i < kTaskKindCount; ++i) {
        const auto k = static_cast<TaskKind>(i);
        EXPECT_EQ(task_kind_from_string(to_string(k)), k);
    }
    EXPECT_FALSE(task_kind_from_string("Juggling"));
}

TEST(Lifecycle, LegalTransitions) {
    using S = StatusTag;
    EXPECT_TRUE(legal_transition(S::Pending, S::Claimed));
    EXPECT_TRUE(legal_transition(S::Claimed, S::Executing));
    EXPECT_TRUE(legal_transition(S::Executing, S::Completed));
    EXPECT_TRUE(legal_transition(S::Claimed, S::Pending));
    EXPECT_TRUE(legal_transition(S::Executing, S::Incomplete));
    EXPECT_FALSE(legal_transition(S::Pending, S::Executing));
    EXPECT_FALSE(legal_transition(S::Pending, S::Incomplete));
    EXPECT_TRUE(legal_transition(S::Pending, S::Incomplete, true));
    EXPECT_FALSE(legal_transition(S::Completed, S::Pending));
    EXPECT_FALSE(legal_transition(S::Incomplete, S::Claimed));
}

TEST(Validate, DefaultsAreValid) { EXPECT_TRUE(validate_scenario(Scenario{}).empty()); }

TEST(Validate, ZeroMultiplierNamesField) {
    Scenario s;
    s.net_latency_multiplier = 0.0;
    const auto v = validate_scenario(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].field, "net_latency_multiplier");
}

TEST(Validate, FractionAboveOne) {
    Scenario s;
    s.failures.fraction = 1.3;
    const auto v = validate_scenario(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].field, "failures.fraction");
}

TEST(Validate, ReportsEveryViolation) {
    Scenario s;
    s.fleet_size = 0;
    s.scheduler_agents = 0;
    s.heterogeneity.battery_init_lo = 0.9;
    s.heterogeneity.battery_init_hi = 0.1;
    s.model_params.serverless_multiplier = 0.9;
    EXPECT_EQ(validate_scenario(s).size(), 4u);
}

TEST(TravelTime, Examples) {
    EXPECT_EQ(travel_time({1, 1, 1}, {1, 1, 1}, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(travel_time({0, 0, 0}, {30, 40, 0}, 2.0), 25.0);
    EXPECT_DOUBLE_EQ(travel_time({0, 0, 0}, {30, 40, 0}, 4.0), 12.5);
}

TEST(ExecTime, EdgeReferenceCase) {
    ModelParams p;
    EXPECT_DOUBLE_EQ(exec_time(recognize_people(30), ExecutionSite::Edge, drone_at({}), p), 30.0);
}

TEST(ExecTime, CloudNativeAddsUpload) {
    ModelParams p;
    p.cloud_speedup = 4.0;
    p.uplink_bandwidth = 2'000'000.0;
    EXPECT_DOUBLE_EQ(exec_time(recognize_people(30), ExecutionSite::CloudNative, drone_at({}), p), 7.75);
}

TEST(ExecTime, ServerlessMultiplier) {
    ModelParams p;
    p.cloud_speedup = 4.0;
    p.uplink_bandwidth = 2'000'000.0;
    p.serverless_multiplier = 1.06;
    EXPECT_NEAR(exec_time(recognize_people(30), ExecutionSite::CloudServerless, drone_at({}), p), 8.215,
                1e-12);
}

TEST(ExecTime, RoutingGainsNothingInCloud) {
    ModelParams p;
    TaskSpec t;
    t.kind = TaskKind::Routing;
    t.compute_work = 10.0;
    t.payload_bytes = 0.0;
    EXPECT_DOUBLE_EQ(exec_time(t, ExecutionSite::CloudNative, drone_at({}), p),
                     exec_time(t, ExecutionSite::Edge, drone_at({}), p));
}

TEST(ExecTime, StrictlyDecreasingInCpuScale) {
    ModelParams p;
    const auto t = recognize_people(30);
    double prev = std::numeric_limits<double>::infinity();
    for (double scale = 0.1; scale <= 1.0; scale += 0.05) {
        DroneState d = drone_at({});
        d.cpu_scale = scale;
        const double e = exec_time(t, ExecutionSite::Edge, d, p);
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(BatteryCost, ZeroWithoutTravelInCloud) {
    ModelParams p;
    EXPECT_EQ(battery_cost(drone_at({5, 5, 5}), recognize_people(30, {5, 5, 5}), ExecutionSite::CloudNative, p),
              0.0);
}

TEST(BatteryCost, TravelOnlyInCloud) {
    ModelParams p;
    p.travel_energy = 40.0;
    EXPECT_DOUBLE_EQ(
        battery_cost(drone_at({}), recognize_people(30, {30, 40, 0}), ExecutionSite::CloudNative, p), 2000.0);
}

TEST(BatteryCost, EdgeAddsComputeEnergy) {
    ModelParams p;
    p.travel_energy = 40.0;
    p.compute_power_edge = 2.0;
    EXPECT_DOUBLE_EQ(battery_cost(drone_at({}), recognize_people(30, {30, 40, 0}), ExecutionSite::Edge, p),
                     2060.0);
}

TEST(BatteryCost, MonotoneInDistance) {
    ModelParams p;
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Position dir{u(gen) - 0.5, u(gen) - 0.5, u(gen)};
        const double near = 100.0 * u(gen);
        const double far = near + 100.0 * u(gen);
        auto at = [&](double k) { return Position{dir.x * k, dir.y * k, dir.z * k}; };
        for (auto site : {ExecutionSite::Edge, ExecutionSite::CloudNative}) {
            const double c1 = battery_cost(drone_at({}), recognize_people(30, at(near)), site, p);
            const double c2 = battery_cost(drone_at({}), recognize_people(30, at(far)), site, p);
            EXPECT_LE(c1, c2);
            EXPECT_GE(c1, 0.0);
        }
    }
}

TEST(Feasible, MissingSensor) {
    DroneState d = drone_at({});
    d.sensors.erase(SensorKind::CameraPeople);
    EXPECT_FALSE(feasible(d, recognize_people(30), ExecutionSite::Edge, ModelParams{}));
}

TEST(Feasible, BatteryBoundaryIsInclusive) {
    ModelParams p;
    const auto t = recognize_people(30, {30, 40, 0});
    DroneState d = drone_at({});
    d.battery_level = battery_cost(d, t, ExecutionSite::Edge, p);
    EXPECT_TRUE(feasible(d, t, ExecutionSite::Edge, p));
    d.battery_level = std::nextafter(d.battery_level, 0.0);
    EXPECT_FALSE(feasible(d, t, ExecutionSite::Edge, p));
}

TEST(Feasible, BusyDroneNeverFeasible) {
    DroneState d = drone_at({});
    d.status = Busy{3};
    EXPECT_FALSE(feasible(d, recognize_people(30), ExecutionSite::Edge, ModelParams{}));
}
