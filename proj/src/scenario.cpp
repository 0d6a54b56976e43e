#include "ptpsec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace ptpsec {

using nlohmann::json;

std::string_view to_string(SyncMode mode) noexcept {
    return mode == SyncMode::ptp ? "ptp" : "ptpsec";
}

SyncMode sync_mode_from_string(std::string_view name) {
    if (name == "ptp") return SyncMode::ptp;
    if (name == "ptpsec") return SyncMode::ptpsec;
    throw SimError(Errc::validation_error, "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(PathPolicy policy) noexcept {
    return policy == PathPolicy::all_paths ? "all" : "round_robin";
}

PathPolicy path_policy_from_string(std::string_view name) {
    if (name == "all") return PathPolicy::all_paths;
    if (name == "round_robin") return PathPolicy::round_robin;
    throw SimError(Errc::validation_error, "unknown path policy '" + std::string(name) + "'");
}

std::string Scenario::name() const {
    if (origin.empty() || origin == "<string>")
        return "scenario";
    return std::filesystem::path(origin).stem().string();
}

namespace {

// ---- parsing helpers -------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw SimError(Errc::validation_error, where + ": missing field '" + key + "'");
    return *it;
}

double number(const json& v, const char* key, const std::string& where) {
    if (!v.is_number())
        throw SimError(Errc::parse_error, where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double number_field(const json& obj, const char* key, const std::string& where) {
    return number(require(obj, key, where), key, where);
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, key, where);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string())
        throw SimError(Errc::parse_error, where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

std::string string_or(const json& obj, const char* key, const std::string& fallback,
                      const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_string())
        throw SimError(Errc::parse_error, where + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

DurationNs us_to_ns(double us) { return static_cast<DurationNs>(std::llround(us * 1e3)); }
TimeNs s_to_ns(double s) { return static_cast<TimeNs>(std::llround(s * 1e9)); }
double ns_to_us(DurationNs ns) { return static_cast<double>(ns) / 1e3; }
double ns_to_s(TimeNs ns) { return static_cast<double>(ns) / 1e9; }

TopologySpec parse_topology(const json& j) {
    const std::string where = "topology";
    TopologySpec spec;
    for (const auto& n : require(j, "nodes", where)) {
        if (!n.is_string())
            throw SimError(Errc::parse_error, "topology.nodes entries must be strings");
        spec.nodes.push_back(n.get<std::string>());
    }
    for (const auto& e : require(j, "edges", where)) {
        Edge edge;
        edge.id = string_field(e, "id", "topology.edges");
        edge.node_a = string_field(e, "a", "topology.edges");
        edge.node_b = string_field(e, "b", "topology.edges");
        edge.delay_ab = us_to_ns(number_field(e, "delay_ab_us", "topology.edges"));
        edge.delay_ba = us_to_ns(number_field(e, "delay_ba_us", "topology.edges"));
        spec.edges.push_back(std::move(edge));
    }
    spec.master = string_field(j, "master", where);
    for (const auto& s : require(j, "slaves", where)) {
        if (!s.is_string())
            throw SimError(Errc::parse_error, "topology.slaves entries must be strings");
        spec.slaves.push_back(s.get<std::string>());
    }
    return spec;
}

std::set<MessageKind> parse_message_filter(const json& arr, const std::string& where) {
    std::set<MessageKind> filter;
    if (!arr.is_array() || arr.empty())
        throw SimError(Errc::validation_error, where + ": 'messages' must be a non-empty array");
    for (const auto& m : arr) {
        if (!m.is_string())
            throw SimError(Errc::parse_error, where + ": message names must be strings");
        std::string name = m.get<std::string>();
        if (name == "all") {
            return {MessageKind::sync,       MessageKind::follow_up, MessageKind::delay_req,
                    MessageKind::delay_resp, MessageKind::meas,      MessageKind::meas_fup};
        }
        filter.insert(message_kind_from_string(name));
    }
    return filter;
}

AttackSpec parse_attack(const json& j, std::size_t index) {
    const std::string where = "attacks[" + std::to_string(index) + "]";
    AttackSpec spec;
    spec.edge_id = string_field(j, "edge", where);
    spec.direction = link_direction_from_string(string_field(j, "direction", where));
    spec.message_filter = parse_message_filter(require(j, "messages", where), where);

    std::string kind = string_field(j, "kind", where);
    if (kind == "static")
        spec.profile.kind = AttackProfile::Kind::static_delay;
    else if (kind == "incremental")
        spec.profile.kind = AttackProfile::Kind::incremental;
    else
        throw SimError(Errc::validation_error, where + ": unknown attack kind '" + kind + "'");

    spec.profile.epsilon = us_to_ns(number_field(j, "epsilon_us", where));
    spec.profile.delta_per_second = us_to_ns(number_or(j, "delta_us_per_s", 0.0, where));
    spec.profile.start = s_to_ns(number_field(j, "start_s", where));
    spec.profile.end = s_to_ns(number_field(j, "end_s", where));
    return spec;
}

Scenario parse_scenario_object(const json& root, const std::string& origin) {
    Scenario s;
    s.origin = origin;
    s.topology = parse_topology(require(root, "topology", "scenario"));

    if (auto it = root.find("clocks"); it != root.end()) {
        for (const auto& [node, spec] : it->items()) {
            ClockSpec clock;
            clock.offset = us_to_ns(number_or(spec, "offset_us", 0.0, "clocks." + node));
            clock.drift_ppb = static_cast<std::int64_t>(
                std::llround(number_or(spec, "drift_ppm", 0.0, "clocks." + node) * 1e3));
            s.clocks.emplace(node, clock);
        }
    }

    if (auto it = root.find("protocol"); it != root.end()) {
        const json& p = *it;
        s.mode = sync_mode_from_string(string_or(p, "mode", "ptpsec", "protocol"));
        s.sync_interval = s_to_ns(number_or(p, "sync_interval_s", 1.0, "protocol"));
        s.residence = us_to_ns(number_or(p, "residence_us", 10.0, "protocol"));
        s.policy = path_policy_from_string(string_or(p, "path_policy", "all", "protocol"));
    }

    if (auto it = root.find("attacks"); it != root.end()) {
        if (!it->is_array())
            throw SimError(Errc::parse_error, "attacks must be an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            s.attacks.push_back(parse_attack((*it)[i], i));
    }

    const json& run = require(root, "run", "scenario");
    s.run.duration = s_to_ns(number_field(run, "duration_s", "run"));
    if (auto it = run.find("seed"); it != run.end()) {
        if (!it->is_number_integer() && !it->is_number_unsigned())
            throw SimError(Errc::parse_error, "run.seed must be an integer");
        s.run.seed = it->get<std::uint64_t>();
    }
    if (auto it = run.find("jitter"); it != run.end()) {
        std::string kind = string_or(*it, "kind", "none", "run.jitter");
        if (kind == "none")
            s.run.jitter.kind = JitterModel::Kind::none;
        else if (kind == "uniform")
            s.run.jitter.kind = JitterModel::Kind::uniform;
        else
            throw SimError(Errc::validation_error, "run.jitter: unknown kind '" + kind + "'");
        s.run.jitter.half_width = us_to_ns(number_or(*it, "half_width_us", 0.0, "run.jitter"));
    }
    s.run.threshold = us_to_ns(number_or(run, "threshold_us", 1.0, "run"));
    if (auto it = run.find("attacker_bound"); it != run.end()) {
        if (!it->is_number_integer() && !it->is_number_unsigned())
            throw SimError(Errc::parse_error, "run.attacker_bound must be an integer");
        s.run.attacker_bound = it->get<int>();
    }
    if (auto it = run.find("assert_detection"); it != run.end()) {
        if (!it->is_boolean())
            throw SimError(Errc::parse_error, "run.assert_detection must be a boolean");
        s.run.assert_detection = it->get<bool>();
    }

    if (auto it = root.find("outputs"); it != root.end()) {
        s.outputs.csv = string_or(*it, "csv", "", "outputs");
        s.outputs.summary = string_or(*it, "summary", "", "outputs");
    }

    validate_scenario(s);
    return s;
}

} // namespace

Scenario parse_scenario_json(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SimError(Errc::parse_error, origin + ": " + e.what());
    }
    if (!root.is_object())
        throw SimError(Errc::parse_error, origin + ": top level must be an object");

    try {
        return parse_scenario_object(root, origin);
    } catch (const json::exception& e) {
        // Structural misuse (wrong container shapes) surfaces as a parse
        // failure, not an internal error.
        throw SimError(Errc::parse_error, origin + ": " + e.what());
    }
}

Scenario parse_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw SimError(Errc::io_error, "cannot open scenario file '" + file.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_json(text.str(), file.string());
}

std::string scenario_to_json(const Scenario& s) {
    json root;

    json topo;
    topo["nodes"] = s.topology.nodes;
    topo["edges"] = json::array();
    for (const auto& e : s.topology.edges) {
        json je;
        je["id"] = e.id;
        je["a"] = e.node_a;
        je["b"] = e.node_b;
        je["delay_ab_us"] = ns_to_us(e.delay_ab);
        je["delay_ba_us"] = ns_to_us(e.delay_ba);
        topo["edges"].push_back(je);
    }
    topo["master"] = s.topology.master;
    topo["slaves"] = s.topology.slaves;
    root["topology"] = topo;

    json clocks = json::object();
    for (const auto& [node, spec] : s.clocks) {
        clocks[node] = {{"offset_us", ns_to_us(spec.offset)},
                        {"drift_ppm", static_cast<double>(spec.drift_ppb) / 1e3}};
    }
    root["clocks"] = clocks;

    root["protocol"] = {{"mode", std::string(to_string(s.mode))},
                        {"sync_interval_s", ns_to_s(s.sync_interval)},
                        {"residence_us", ns_to_us(s.residence)},
                        {"path_policy", std::string(to_string(s.policy))}};

    json attacks = json::array();
    for (const auto& a : s.attacks) {
        json ja;
        ja["edge"] = a.edge_id;
        ja["direction"] = std::string(to_string(a.direction));
        json kinds = json::array();
        for (MessageKind k : a.message_filter)
            kinds.push_back(std::string(to_string(k)));
        ja["messages"] = kinds;
        ja["kind"] = a.profile.kind == AttackProfile::Kind::static_delay ? "static" : "incremental";
        ja["epsilon_us"] = ns_to_us(a.profile.epsilon);
        ja["delta_us_per_s"] = ns_to_us(a.profile.delta_per_second);
        ja["start_s"] = ns_to_s(a.profile.start);
        ja["end_s"] = ns_to_s(a.profile.end);
        attacks.push_back(ja);
    }
    root["attacks"] = attacks;

    json run;
    run["duration_s"] = ns_to_s(s.run.duration);
    run["seed"] = s.run.seed;
    run["jitter"] = {
        {"kind", s.run.jitter.kind == JitterModel::Kind::none ? "none" : "uniform"},
        {"half_width_us", ns_to_us(s.run.jitter.half_width)}};
    run["threshold_us"] = ns_to_us(s.run.threshold);
    if (s.run.attacker_bound)
        run["attacker_bound"] = *s.run.attacker_bound;
    run["assert_detection"] = s.run.assert_detection;
    root["run"] = run;

    root["outputs"] = {{"csv", s.outputs.csv}, {"summary", s.outputs.summary}};

    return root.dump(2) + "\n";
}

void validate_scenario(const Scenario& s) {
    NetworkGraph graph = build_graph(s.topology);
    AttackerState attacker(s.attacks);
    validate_attacker(attacker, graph);

    for (const auto& [node, clock] : s.clocks) {
        if (!graph.has_node(node))
            throw SimError(Errc::unknown_node, "clocks: unknown node '" + node + "'");
    }

    if (s.run.duration < 0)
        throw SimError(Errc::validation_error, "run.duration_s must be >= 0");
    if (s.run.threshold < 0)
        throw SimError(Errc::validation_error, "run.threshold_us must be >= 0");
    if (s.run.jitter.half_width < 0)
        throw SimError(Errc::validation_error, "run.jitter.half_width_us must be >= 0");
    if (s.sync_interval <= 0)
        throw SimError(Errc::validation_error, "protocol.sync_interval_s must be positive");
    if (s.residence < 0)
        throw SimError(Errc::validation_error, "protocol.residence_us must be >= 0");

    for (const auto& a : s.attacks) {
        if (a.profile.end > s.run.duration)
            throw SimError(Errc::validation_error,
                           "attack on '" + a.edge_id + "' extends past the run duration");
    }

    for (const auto& slave : s.topology.slaves) {
        DisjointPathSet paths = find_edge_disjoint_paths(graph, s.topology.master, slave);
        int redundant = paths.redundant_count();
        if (s.mode == SyncMode::ptpsec && redundant < 1)
            throw SimError(Errc::no_redundant_path,
                           "slave '" + slave + "' has no redundant path to the master");
        if (s.run.attacker_bound) {
            if (*s.run.attacker_bound < 0 || *s.run.attacker_bound > redundant / 2)
                throw SimError(Errc::bound_violation,
                               "attacker_bound exceeds floor(n/2) for slave '" + slave + "'");
        }
    }
}

// ---- execution -------------------------------------------------------

namespace {

std::uint64_t slave_stream_seed(std::uint64_t seed, const std::string& slave) {
    // FNV-1a over the slave name, mixed with the run seed: multipoint
    // runs give each slave the stream it would get in a solo run.
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : slave) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h ^ seed;
}

struct SlaveRuntime {
    std::string name;
    DisjointPathSet paths;
    ProtocolConfig cfg;
    LocalClock clock;
    MasterSession master;
    SlaveSession slave;
    JitterStream jitter;
    std::map<std::uint64_t, std::uint64_t> packets_in_flight;
    SlaveRunResult result;

    SlaveRuntime(std::string n, DisjointPathSet p, ProtocolConfig c, LocalClock cl,
                 JitterStream j)
        : name(std::move(n)), paths(std::move(p)), cfg(c), clock(cl), master(c), slave(c),
          jitter(j) {}
};

class ScenarioEngine {
public:
    ScenarioEngine(const Scenario& s)
        : scenario_(s), graph_(build_graph(s.topology)), attacker_(s.attacks) {
        attacker_.validate_against(graph_);

        auto clock_of = [&](const std::string& node) {
            auto it = s.clocks.find(node);
            return it == s.clocks.end() ? LocalClock()
                                        : LocalClock(it->second.offset, it->second.drift_ppb);
        };
        master_clock_ = clock_of(s.topology.master);

        for (const auto& slave_name : s.topology.slaves) {
            DisjointPathSet paths =
                find_edge_disjoint_paths(graph_, s.topology.master, slave_name);
            int redundant = paths.redundant_count();
            if (s.mode == SyncMode::ptpsec && redundant < 1)
                throw SimError(Errc::no_redundant_path,
                               "slave '" + slave_name + "' has no redundant path");
            ProtocolConfig cfg;
            cfg.mode = s.mode;
            cfg.sync_interval = s.sync_interval;
            cfg.residence = s.residence;
            cfg.policy = s.policy;
            cfg.redundant_paths = s.mode == SyncMode::ptpsec ? redundant : 0;
            cfg.detect_threshold = s.run.threshold;
            cfg.attacker_bound = s.run.attacker_bound.value_or(cfg.redundant_paths / 2);

            JitterStream jitter(s.run.jitter, slave_stream_seed(s.run.seed, slave_name));
            auto rt = std::make_unique<SlaveRuntime>(slave_name, std::move(paths), cfg,
                                                     clock_of(slave_name), jitter);
            rt->result.slave = slave_name;
            rt->result.redundant_paths = cfg.redundant_paths;
            slaves_.push_back(std::move(rt));
        }
    }

    RunOutput run() {
        std::uint64_t rounds = static_cast<std::uint64_t>(
            scenario_.sync_interval > 0 ? scenario_.run.duration / scenario_.sync_interval : 0);

        for (auto& rt : slaves_) {
            for (std::uint64_t k = 0; k < rounds; ++k) {
                TimeNs at = static_cast<TimeNs>(k) * scenario_.sync_interval;
                SlaveRuntime* r = rt.get();
                sim_.schedule(at, EventKind::timer_expiry, [this, r, k] { begin_round(*r, k); });
            }
        }
        sim_.run_until(scenario_.run.duration);

        RunOutput out;
        out.mode = scenario_.mode;
        out.seed = scenario_.run.seed;
        out.rounds_initiated = rounds;
        for (auto& rt : slaves_) {
            finalize(*rt);
            out.slaves.push_back(std::move(rt->result));
        }
        return out;
    }

private:
    void begin_round(SlaveRuntime& rt, std::uint64_t seq) {
        send_from_master(rt, rt.master.start_round(seq), sim_.now());
        TimeNs timeout = sim_.now() + 3 * scenario_.sync_interval;
        sim_.schedule(timeout, EventKind::timer_expiry, [this, r = &rt, seq] {
            r->master.expire_round(seq);
            r->slave.expire_round(seq);
            r->packets_in_flight.erase(seq);
        });
    }

    void send_from_master(SlaveRuntime& rt, const std::vector<Emission>& emissions,
                          TimeNs trigger) {
        for (const auto& em : emissions) {
            sim_.schedule(trigger + em.hold, EventKind::timer_expiry,
                          [this, r = &rt, msg = em.msg] { master_egress(*r, msg); });
        }
    }

    void send_from_slave(SlaveRuntime& rt, const std::vector<Emission>& emissions,
                         TimeNs trigger) {
        for (const auto& em : emissions) {
            sim_.schedule(trigger + em.hold, EventKind::timer_expiry,
                          [this, r = &rt, msg = em.msg] { slave_egress(*r, msg); });
        }
    }

    void master_egress(SlaveRuntime& rt, const Message& msg) {
        TimeNs now = sim_.now();
        count_packet(rt, msg.seq);
        if (is_event_message(msg.kind))
            send_from_master(rt, rt.master.on_egress(msg, master_clock_.local_time(now)), now);
        const Path& route = rt.paths.paths.at(static_cast<std::size_t>(msg.path_index));
        PacketEnvelope env = plan_transit(graph_, route, /*reverse=*/false,
                                          scenario_.topology.master, msg, now, attacker_,
                                          rt.jitter);
        sim_.schedule(env.arrival_true_time, EventKind::packet_arrival,
                      [this, r = &rt, msg] { deliver_to_slave(*r, msg); });
    }

    void slave_egress(SlaveRuntime& rt, const Message& msg) {
        TimeNs now = sim_.now();
        count_packet(rt, msg.seq);
        if (is_event_message(msg.kind))
            send_from_slave(rt, rt.slave.on_egress(msg, rt.clock.local_time(now)), now);
        const Path& route = rt.paths.paths.at(static_cast<std::size_t>(msg.path_index));
        PacketEnvelope env = plan_transit(graph_, route, /*reverse=*/true, rt.name, msg, now,
                                          attacker_, rt.jitter);
        sim_.schedule(env.arrival_true_time, EventKind::packet_arrival,
                      [this, r = &rt, msg] { deliver_to_master(*r, msg); });
        drain_completed(rt);
    }

    void deliver_to_slave(SlaveRuntime& rt, const Message& msg) {
        TimeNs now = sim_.now();
        try {
            send_from_slave(rt, rt.slave.handle_message(msg, rt.clock.local_time(now)), now);
        } catch (const SimError& e) {
            if (e.code() != Errc::stale_round)
                throw;
            ++rt.result.late_messages;
        }
        drain_completed(rt);
    }

    void deliver_to_master(SlaveRuntime& rt, const Message& msg) {
        TimeNs now = sim_.now();
        try {
            send_from_master(rt, rt.master.handle_message(msg, master_clock_.local_time(now)),
                             now);
        } catch (const SimError& e) {
            if (e.code() != Errc::stale_round)
                throw;
            ++rt.result.late_messages;
        }
    }

    void count_packet(SlaveRuntime& rt, std::uint64_t seq) {
        ++rt.packets_in_flight[seq];
        ++rt.result.packets_total;
    }

    void drain_completed(SlaveRuntime& rt) {
        for (RoundResult& res : rt.slave.take_completed()) {
            TimeNs now = sim_.now();
            rt.clock.apply_correction(res.correction, now);

            RoundRow row;
            row.round = res.seq;
            row.initiated_at = static_cast<TimeNs>(res.seq) * scenario_.sync_interval;
            row.theta_rep = res.theta_rep;
            // Reported ground truth: the master's lead over the slave.
            row.theta_act = true_offset(rt.clock, master_clock_, now);
            row.theta_rect = res.theta_rect;
            row.alphas.assign(static_cast<std::size_t>(rt.cfg.redundant_paths), std::nullopt);
            for (const auto& m : res.measurements)
                row.alphas.at(static_cast<std::size_t>(m.path_index) - 1) = m.alpha;
            row.attacked = res.verdict ? res.verdict->attacked : false;
            rt.result.rows.push_back(std::move(row));
            ++rt.result.rounds_completed;

            auto it = rt.packets_in_flight.find(res.seq);
            if (it != rt.packets_in_flight.end()) {
                int count = static_cast<int>(it->second);
                if (rt.result.rounds_completed == 1)
                    rt.result.packets_per_cycle = count;
                else if (rt.result.packets_per_cycle && *rt.result.packets_per_cycle != count)
                    rt.result.packets_per_cycle.reset();
                rt.packets_in_flight.erase(it);
            }
        }
    }

    void finalize(SlaveRuntime& rt) {
        SlaveRunResult& res = rt.result;
        res.paths = rt.paths;
        res.rounds_dropped = rt.slave.dropped_rounds();
        if (!res.rows.empty()) {
            res.final_theta_act = res.rows.back().theta_act;
            for (const auto& row : res.rows)
                res.max_abs_theta_act =
                    std::max<DurationNs>(res.max_abs_theta_act, std::llabs(row.theta_act));
        }

        if (scenario_.mode == SyncMode::ptpsec && !attacker_.empty() && !res.rows.empty()) {
            std::vector<detection::RoundVerdict> series;
            series.reserve(res.rows.size());
            for (const auto& row : res.rows)
                series.push_back({row.round, row.initiated_at, row.attacked});
            for (const auto& row : res.rows) {
                if (row.attacked) {
                    res.detection.detected = true;
                    res.detection.first_attacked_round = row.round;
                    break;
                }
            }
            try {
                res.detection.start_latency_rounds =
                    detection::detection_latency(series, attacker_.earliest_start());
            } catch (const SimError&) {
            }
            try {
                res.detection.end_latency_rounds =
                    detection::clear_latency(series, attacker_.latest_end());
            } catch (const SimError&) {
            }
        }
    }

    const Scenario& scenario_;
    NetworkGraph graph_;
    AttackerState attacker_;
    Simulator sim_;
    LocalClock master_clock_;
    std::vector<std::unique_ptr<SlaveRuntime>> slaves_;
};

} // namespace

const SlaveRunResult& RunOutput::slave(const std::string& name) const {
    for (const auto& s : slaves) {
        if (s.slave == name)
            return s;
    }
    throw SimError(Errc::unknown_node, "no result for slave '" + name + "'");
}

RunOutput run_scenario(const Scenario& s) {
    ScenarioEngine engine(s);
    return engine.run();
}

// ---- rendering -------------------------------------------------------

std::string format_us(DurationNs ns) {
    bool neg = ns < 0;
    unsigned long long a = neg ? static_cast<unsigned long long>(-(ns + 1)) + 1
                               : static_cast<unsigned long long>(ns);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%03llu", neg ? "-" : "", a / 1000ull, a % 1000ull);
    return buf;
}

std::string format_seconds(TimeNs ns) {
    bool neg = ns < 0;
    unsigned long long a = neg ? static_cast<unsigned long long>(-(ns + 1)) + 1
                               : static_cast<unsigned long long>(ns);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%03llu", neg ? "-" : "", a / 1000000000ull,
                  (a % 1000000000ull) / 1000000ull);
    return buf;
}

std::string path_notation(const Path& path) {
    std::string out;
    for (const auto& step : path.steps) {
        if (!out.empty())
            out += ",";
        out += step.edge_id;
        out += step.forward ? "+" : "-";
    }
    return out;
}

std::string render_csv(const SlaveRunResult& result) {
    std::ostringstream out;
    out << "round,true_time_s,theta_rep_us,theta_act_us,theta_rect_us";
    for (int i = 1; i <= result.redundant_paths; ++i)
        out << ",alpha_p" << i << "_us";
    out << ",attacked\n";
    for (const auto& row : result.rows) {
        out << row.round << ',' << format_seconds(row.initiated_at) << ','
            << format_us(row.theta_rep) << ',' << format_us(row.theta_act) << ','
            << format_us(row.theta_rect);
        for (const auto& alpha : row.alphas) {
            out << ',';
            if (alpha)
                out << format_us(*alpha);
        }
        out << ',' << (row.attacked ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string render_summary_json(const Scenario& s, const RunOutput& out) {
    json root;
    root["scenario"] = s.name();
    root["mode"] = std::string(to_string(out.mode));
    root["seed"] = out.seed;
    root["sync_interval_s"] = ns_to_s(s.sync_interval);
    root["rounds_initiated"] = out.rounds_initiated;

    json slaves = json::object();
    for (const auto& res : out.slaves) {
        json js;
        json paths = json::array();
        for (const auto& p : res.paths.paths)
            paths.push_back(path_notation(p));
        js["paths"] = paths;
        js["redundant_paths"] = res.redundant_paths;
        js["rounds_completed"] = res.rounds_completed;
        js["rounds_dropped"] = res.rounds_dropped;
        js["late_messages"] = res.late_messages;
        js["packets_total"] = res.packets_total;
        if (res.packets_per_cycle)
            js["packets_per_cycle"] = *res.packets_per_cycle;
        else
            js["packets_per_cycle"] = nullptr;
        js["final_theta_act_us"] = ns_to_us(res.final_theta_act);
        js["max_abs_theta_act_us"] = ns_to_us(res.max_abs_theta_act);

        json det;
        det["detected"] = res.detection.detected;
        if (res.detection.first_attacked_round)
            det["first_attacked_round"] = *res.detection.first_attacked_round;
        if (res.detection.start_latency_rounds)
            det["start_latency_rounds"] = *res.detection.start_latency_rounds;
        if (res.detection.end_latency_rounds)
            det["end_latency_rounds"] = *res.detection.end_latency_rounds;
        js["detection"] = det;

        slaves[res.slave] = js;
    }
    root["slaves"] = slaves;
    return root.dump(2) + "\n";
}

namespace {

std::string with_slave_suffix(const std::string& base, const std::string& slave) {
    auto dot = base.find_last_of('.');
    if (dot == std::string::npos)
        return base + "." + slave;
    return base.substr(0, dot) + "." + slave + base.substr(dot);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SimError(Errc::io_error, "cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw SimError(Errc::io_error, "failed writing '" + path.string() + "'");
}

} // namespace

void emit_outputs(const RunOutput& out, const Scenario& s, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    std::string csv_name = s.outputs.csv.empty() ? s.name() + ".csv" : s.outputs.csv;
    std::string summary_name =
        s.outputs.summary.empty() ? s.name() + "_summary.json" : s.outputs.summary;

    for (const auto& res : out.slaves) {
        std::string name =
            out.slaves.size() == 1 ? csv_name : with_slave_suffix(csv_name, res.slave);
        write_file(out_dir / name, render_csv(res));
    }
    write_file(out_dir / summary_name, render_summary_json(s, out));
}

} // namespace ptpsec
