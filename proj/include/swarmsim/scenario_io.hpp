#pragma once

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "swarmsim/scenario.hpp"

namespace swarmsim {

using json = nlohmann::ordered_json;

/// Malformed scenario document. `field` is the dotted path of the offending
/// key, empty for syntax errors (whose message carries line and column).
class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(std::string field, const std::string& what)
        : std::runtime_error(what), field(std::move(field)) {}
    std::string field;
};

inline std::optional<ControllerMode> controller_mode_from_string(std::string_view s) {
    if (s == "centralized") return ControllerMode::Centralized;
    if (s == "distributed") return ControllerMode::Distributed;
    return std::nullopt;
}

inline std::optional<ExecutionSite> execution_site_from_string(std::string_view s) {
    for (auto site : {ExecutionSite::Edge, ExecutionSite::CloudNative, ExecutionSite::CloudServerless})
        if (to_string(site) == s) return site;
    return std::nullopt;
}

namespace detail {

inline std::string join_path(const std::string& base, std::string_view key) {
    return base.empty() ? std::string(key) : base + "." + std::string(key);
}

/// Reads the members of one JSON object; every member must be consumed.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw ScenarioParseError(path_, "'" + label() + "' must be an object");
    }

    bool has(std::string_view key) const { return j_.contains(key); }

    template <class F>
    void with(std::string_view key, F&& f) {
        seen_.insert(std::string(key));
        auto it = j_.find(key);
        if (it == j_.end()) return;
        f(*it, join_path(path_, key));
    }

    void number(std::string_view key, double& out) {
        with(key, [&](const json& v, const std::string& p) { out = as_number(v, p); });
    }
    void number(std::string_view key, std::optional<double>& out) {
        with(key, [&](const json& v, const std::string& p) {
            if (v.is_null()) out.reset(); else out = as_number(v, p);
        });
    }
    void count(std::string_view key, std::size_t& out) {
        with(key, [&](const json& v, const std::string& p) { out = as_count(v, p); });
    }
    void count(std::string_view key, std::optional<std::size_t>& out) {
        with(key, [&](const json& v, const std::string& p) {
            if (v.is_null()) out.reset(); else out = as_count(v, p);
        });
    }
    void flag(std::string_view key, bool& out) {
        with(key, [&](const json& v, const std::string& p) {
            if (!v.is_boolean()) throw ScenarioParseError(p, "'" + p + "' must be a boolean");
            out = v.get<bool>();
        });
    }
    void object(std::string_view key, const std::function<void(ObjectReader&)>& f) {
        with(key, [&](const json& v, const std::string& p) {
            ObjectReader sub(v, p);
            f(sub);
            sub.finish();
        });
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) {
                const auto p = join_path(path_, it.key());
                throw ScenarioParseError(p, "unknown key '" + p + "'");
            }
    }

    static double as_number(const json& v, const std::string& p) {
        if (!v.is_number()) throw ScenarioParseError(p, "'" + p + "' must be a number");
        return v.get<double>();
    }
    static std::uint64_t as_u64(const json& v, const std::string& p) {
        if (!v.is_number_unsigned())
            throw ScenarioParseError(p, "'" + p + "' must be a non-negative integer");
        return v.get<std::uint64_t>();
    }
    static std::size_t as_count(const json& v, const std::string& p) {
        return static_cast<std::size_t>(as_u64(v, p));
    }
    static std::string as_string(const json& v, const std::string& p) {
        if (!v.is_string()) throw ScenarioParseError(p, "'" + p + "' must be a string");
        return v.get<std::string>();
    }

private:
    std::string label() const { return path_.empty() ? "<root>" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

inline void read_per_kind(ObjectReader& r, std::string_view key, PerKind& table) {
    r.object(key, [&](ObjectReader& sub) {
        for (std::size_t i = 0; i < kTaskKindCount; ++i)
            sub.number(to_string(static_cast<TaskKind>(i)), table[i]);
    });
}

inline json per_kind_json(const PerKind& table) {
    json j = json::object();
    for (std::size_t i = 0; i < kTaskKindCount; ++i)
        j[std::string(to_string(static_cast<TaskKind>(i)))] = table[i];
    return j;
}

}  // namespace detail

/// Builds a Scenario from a JSON document. Only `fleet_size` is required;
/// anything absent keeps its default. Unknown keys are rejected.
inline Scenario scenario_from_json(const json& doc) {
    using detail::ObjectReader;
    Scenario s;
    ObjectReader root(doc, "");
    if (!root.has("fleet_size"))
        throw ScenarioParseError("fleet_size", "missing required field 'fleet_size'");
    root.count("fleet_size", s.fleet_size);
    root.number("arena_radius", s.arena_radius);
    root.number("arena_height", s.arena_height);
    root.with("controller_mode", [&](const json& v, const std::string& p) {
        auto m = controller_mode_from_string(ObjectReader::as_string(v, p));
        if (!m) throw ScenarioParseError(p, "'" + p + "' must be \"centralized\" or \"distributed\"");
        s.controller_mode = *m;
    });
    root.count("scheduler_agents", s.scheduler_agents);
    root.number("net_latency_multiplier", s.net_latency_multiplier);
    root.with("execution_site", [&](const json& v, const std::string& p) {
        auto site = execution_site_from_string(ObjectReader::as_string(v, p));
        if (!site)
            throw ScenarioParseError(
                p, "'" + p + "' must be \"edge\", \"cloud_native\" or \"cloud_serverless\"");
        s.execution_site = *site;
    });
    root.object("heterogeneity", [&](ObjectReader& h) {
        auto& c = s.heterogeneity;
        h.flag("enabled", c.enabled);
        h.number("sensor_drop_prob", c.sensor_drop_prob);
        h.with("battery_init_range", [&](const json& v, const std::string& p) {
            if (!v.is_array() || v.size() != 2)
                throw ScenarioParseError(p, "'" + p + "' must be a [lo, hi] pair");
            c.battery_init_lo = ObjectReader::as_number(v[0], p);
            c.battery_init_hi = ObjectReader::as_number(v[1], p);
        });
        h.with("cpu_scale_choices", [&](const json& v, const std::string& p) {
            if (!v.is_array()) throw ScenarioParseError(p, "'" + p + "' must be an array");
            c.cpu_scale_choices.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                ObjectReader e(v[i], p + "[" + std::to_string(i) + "]");
                CpuScaleChoice choice;
                e.number("scale", choice.scale);
                e.number("weight", choice.weight);
                e.finish();
                c.cpu_scale_choices.push_back(choice);
            }
        });
    });
    root.object("failures", [&](ObjectReader& f) {
        auto& c = s.failures;
        f.flag("enabled", c.enabled);
        f.number("interval", c.interval);
        f.number("fraction", c.fraction);
        f.number("outage_duration", c.outage_duration);
        f.number("permanent_prob", c.permanent_prob);
        f.number("detect_timeout", c.detect_timeout);
    });
    root.object("workload", [&](ObjectReader& w) {
        auto& c = s.workload;
        w.count("backlog_target", c.backlog_target);
        w.flag("include_tree", c.include_tree);
        w.number("obstacle_prob", c.obstacle_prob);
        w.number("generator_period", c.generator_period);
    });
    root.object("model_params", [&](ObjectReader& m) {
        auto& p = s.model_params;
        m.number("drone_speed", p.drone_speed);
        m.number("travel_energy", p.travel_energy);
        m.number("compute_power_edge", p.compute_power_edge);
        m.number("edge_ref_speed", p.edge_ref_speed);
        m.number("cloud_speedup", p.cloud_speedup);
        m.number("serverless_multiplier", p.serverless_multiplier);
        m.number("uplink_bandwidth", p.uplink_bandwidth);
        m.number("battery_capacity", p.battery_capacity);
        detail::read_per_kind(m, "kind_work", p.kind_work);
        detail::read_per_kind(m, "kind_cloud_speedup_override", p.kind_cloud_speedup_override);
        detail::read_per_kind(m, "payload_bytes_by_kind", p.payload_bytes_by_kind);
    });
    root.object("network", [&](ObjectReader& n) {
        n.number("rtt_median", s.network.rtt_median);
        n.number("rtt_sigma", s.network.rtt_sigma);
    });
    root.object("central", [&](ObjectReader& c) {
        c.number("per_drone_scan_cost", s.central.per_drone_scan_cost);
    });
    root.object("distributed", [&](ObjectReader& d) {
        d.count("snapshot_limit", s.distributed.snapshot_limit);
        d.number("backoff_interval", s.distributed.backoff_interval);
    });
    root.number("duration", s.duration);
    root.number("latency_warmup", s.latency_warmup);
    root.with("seed", [&](const json& v, const std::string& p) { s.seed = ObjectReader::as_u64(v, p); });
    root.finish();
    return s;
}

/// Parses text; syntax errors report line and column.
inline Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioParseError("", std::string("syntax error: ") + e.what());
    }
    return scenario_from_json(doc);
}

/// Reads a scenario file. I/O failures raise std::runtime_error.
inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

/// Full document with every field spelled out; round-trips through
/// scenario_from_json.
inline json scenario_to_json(const Scenario& s) {
    json j;
    j["fleet_size"] = s.fleet_size;
    j["arena_radius"] = s.arena_radius ? json(*s.arena_radius) : json(nullptr);
    j["arena_height"] = s.arena_height;
    j["controller_mode"] = std::string(to_string(s.controller_mode));
    j["scheduler_agents"] = s.scheduler_agents;
    j["net_latency_multiplier"] = s.net_latency_multiplier;
    j["execution_site"] = std::string(to_string(s.execution_site));

    const auto& h = s.heterogeneity;
    json choices = json::array();
    for (const auto& c : h.cpu_scale_choices) choices.push_back({{"scale", c.scale}, {"weight", c.weight}});
    j["heterogeneity"] = {{"enabled", h.enabled},
                          {"sensor_drop_prob", h.sensor_drop_prob},
                          {"battery_init_range", {h.battery_init_lo, h.battery_init_hi}},
                          {"cpu_scale_choices", choices}};

    const auto& f = s.failures;
    j["failures"] = {{"enabled", f.enabled},
                     {"interval", f.interval},
                     {"fraction", f.fraction},
                     {"outage_duration", f.outage_duration},
                     {"permanent_prob", f.permanent_prob},
                     {"detect_timeout", f.detect_timeout}};

    const auto& w = s.workload;
    j["workload"] = {{"backlog_target", w.backlog_target ? json(*w.backlog_target) : json(nullptr)},
                     {"include_tree", w.include_tree},
                     {"obstacle_prob", w.obstacle_prob},
                     {"generator_period", w.generator_period}};

    const auto& p = s.model_params;
    j["model_params"] = {{"drone_speed", p.drone_speed},
                         {"travel_energy", p.travel_energy},
                         {"compute_power_edge", p.compute_power_edge},
                         {"edge_ref_speed", p.edge_ref_speed},
                         {"cloud_speedup", p.cloud_speedup},
                         {"serverless_multiplier", p.serverless_multiplier},
                         {"uplink_bandwidth", p.uplink_bandwidth},
                         {"battery_capacity", p.battery_capacity},
                         {"kind_work", detail::per_kind_json(p.kind_work)},
                         {"kind_cloud_speedup_override", detail::per_kind_json(p.kind_cloud_speedup_override)},
                         {"payload_bytes_by_kind", detail::per_kind_json(p.payload_bytes_by_kind)}};

    j["network"] = {{"rtt_median", s.network.rtt_median}, {"rtt_sigma", s.network.rtt_sigma}};
    j["central"] = {{"per_drone_scan_cost", s.central.per_drone_scan_cost}};
    j["distributed"] = {{"snapshot_limit", s.distributed.snapshot_limit},
                        {"backoff_interval", s.distributed.backoff_interval}};
    j["duration"] = s.duration;
    j["latency_warmup"] = s.latency_warmup;
    j["seed"] = s.seed;
    return j;
}

inline std::string dump_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

}  // namespace swarmsim
