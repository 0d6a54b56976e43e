// Python bindings for the core operations: round arithmetic, disjoint
// path discovery, detection, and scenario execution. All durations and
// times cross the boundary as integer nanoseconds.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptpsec/detection.hpp"
#include "ptpsec/protocol.hpp"
#include "ptpsec/scenario.hpp"
#include "ptpsec/topology.hpp"

namespace py = pybind11;
using namespace ptpsec;

namespace {

NetworkGraph build_graph_py(const std::vector<std::string>& nodes,
                            const std::vector<std::tuple<std::string, std::string, std::string,
                                                         DurationNs, DurationNs>>& edges,
                            const std::string& master, const std::vector<std::string>& slaves) {
    TopologySpec spec;
    spec.nodes = nodes;
    for (const auto& [id, a, b, fwd, bwd] : edges)
        spec.edges.push_back(Edge{id, a, b, fwd, bwd});
    spec.master = master;
    spec.slaves = slaves;
    return build_graph(std::move(spec));
}

Path make_path(const NetworkGraph& graph, const std::string& origin, const std::string& terminus,
               const std::vector<std::pair<std::string, bool>>& steps) {
    Path p;
    p.origin = origin;
    p.terminus = terminus;
    for (const auto& [edge_id, forward] : steps)
        p.steps.push_back({edge_id, forward});
    validate_path(graph, p);
    return p;
}

std::vector<std::vector<std::pair<std::string, bool>>> paths_py(const NetworkGraph& graph,
                                                                const std::string& source,
                                                                const std::string& sink) {
    std::vector<std::vector<std::pair<std::string, bool>>> out;
    for (const auto& path : find_edge_disjoint_paths(graph, source, sink).paths) {
        std::vector<std::pair<std::string, bool>> steps;
        for (const auto& step : path.steps)
            steps.emplace_back(step.edge_id, step.forward);
        out.push_back(std::move(steps));
    }
    return out;
}

SyncRoundRecord record_from(TimeNs t1, TimeNs t2, TimeNs t3, TimeNs t4,
                            std::optional<TimeNs> tm1, std::optional<TimeNs> tm2,
                            std::optional<TimeNs> tm3, std::optional<TimeNs> tm4) {
    SyncRoundRecord rec;
    rec.t1 = t1;
    rec.t2 = t2;
    rec.t3 = t3;
    rec.t4 = t4;
    rec.tm1 = tm1;
    rec.tm2 = tm2;
    rec.tm3 = tm3;
    rec.tm4 = tm4;
    return rec;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Delay-attack-resilient time synchronization simulator core";

    py::register_exception<SimError>(m, "SimError");

    // Round arithmetic.
    m.def(
        "compute_offset",
        [](TimeNs t1, TimeNs t2, TimeNs t3, TimeNs t4) {
            return compute_offset(record_from(t1, t2, t3, t4, {}, {}, {}, {}));
        },
        py::arg("t1"), py::arg("t2"), py::arg("t3"), py::arg("t4"),
        "Reported offset ((t2 - t1) - (t4 - t3)) / 2, in ns");
    m.def("expected_offset_under_attack", &expected_offset_under_attack, py::arg("theta_true"),
          py::arg("eps1"), py::arg("eps2"),
          "Offset a delayed round reports: theta_true + (eps1 - eps2) / 2");
    m.def(
        "rtt_measurements",
        [](TimeNs t1, TimeNs t2, TimeNs t3, TimeNs t4, TimeNs tm1, TimeNs tm2, TimeNs tm3,
           TimeNs tm4) {
            RttPair rtt = rtt_measurements(record_from(t1, t2, t3, t4, tm1, tm2, tm3, tm4));
            return std::make_pair(rtt.forward, rtt.reverse);
        },
        py::arg("t1"), py::arg("t2"), py::arg("t3"), py::arg("t4"), py::arg("tm1"),
        py::arg("tm2"), py::arg("tm3"), py::arg("tm4"),
        "Cyclic RTT pair (forward, reverse) from the eight round timestamps");
    m.def("asymmetry_estimate", &asymmetry_estimate, py::arg("rtt_forward"),
          py::arg("rtt_reverse"));
    m.def("rectified_offset", &rectified_offset, py::arg("theta_rep"), py::arg("alpha"));
    m.def("messages_per_cycle", &messages_per_cycle, py::arg("redundant_paths"));

    // Topology.
    py::class_<NetworkGraph>(m, "NetworkGraph")
        .def_property_readonly("master", &NetworkGraph::master)
        .def_property_readonly("slaves", &NetworkGraph::slaves)
        .def_property_readonly("nodes", &NetworkGraph::nodes);
    m.def("build_graph", &build_graph_py, py::arg("nodes"), py::arg("edges"), py::arg("master"),
          py::arg("slaves"),
          "Edges are (id, a, b, delay_ab_ns, delay_ba_ns) tuples");
    m.def("find_edge_disjoint_paths", &paths_py, py::arg("graph"), py::arg("source"),
          py::arg("sink"),
          "Maximum set of edge-disjoint paths as lists of (edge_id, forward) steps");
    m.def(
        "true_path_asymmetry",
        [](const NetworkGraph& graph, const std::string& origin, const std::string& terminus,
           const std::vector<std::pair<std::string, bool>>& steps) {
            return true_path_asymmetry(graph, make_path(graph, origin, terminus, steps));
        },
        py::arg("graph"), py::arg("origin"), py::arg("terminus"), py::arg("steps"));

    // Detection.
    py::class_<detection::Verdict>(m, "Verdict")
        .def_readonly("attacked", &detection::Verdict::attacked)
        .def_readonly("triggering", &detection::Verdict::triggering);
    py::class_<detection::Hypothesis>(m, "Hypothesis")
        .def_readonly("consensus_alpha", &detection::Hypothesis::consensus_alpha)
        .def_readonly("implied_path_alphas", &detection::Hypothesis::implied_path_alphas)
        .def_readonly("attacked_paths", &detection::Hypothesis::attacked_paths);
    py::class_<detection::Localization>(m, "Localization")
        .def_readonly("consensus_alpha", &detection::Localization::consensus_alpha)
        .def_readonly("implied_path_alphas", &detection::Localization::implied_path_alphas)
        .def_readonly("attacked_paths", &detection::Localization::attacked_paths)
        .def_readonly("ambiguous", &detection::Localization::ambiguous)
        .def_readonly("alternative", &detection::Localization::alternative);
    m.def(
        "detect",
        [](const std::vector<DurationNs>& estimates, DurationNs threshold) {
            return detection::detect({0, estimates, threshold});
        },
        py::arg("estimates"), py::arg("threshold"));
    m.def(
        "consensus_asymmetry",
        [](const std::vector<DurationNs>& estimates, DurationNs threshold, int attacker_bound) {
            return detection::consensus_asymmetry({0, estimates, threshold}, attacker_bound);
        },
        py::arg("estimates"), py::arg("threshold"), py::arg("attacker_bound"));

    // Scenarios.
    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("name", &Scenario::name)
        .def_property_readonly("mode",
                               [](const Scenario& s) { return std::string(to_string(s.mode)); });
    m.def("load_scenario", [](const std::string& path) { return parse_scenario(path); },
          py::arg("path"));
    m.def("parse_scenario_json", &parse_scenario_json, py::arg("text"),
          py::arg("origin") = "<string>");
    m.def("scenario_to_json", &scenario_to_json, py::arg("scenario"));
    m.def(
        "with_mode",
        [](Scenario s, const std::string& mode) {
            s.mode = sync_mode_from_string(mode);
            validate_scenario(s);
            return s;
        },
        py::arg("scenario"), py::arg("mode"));
    m.def(
        "with_seed",
        [](Scenario s, std::uint64_t seed) {
            s.run.seed = seed;
            return s;
        },
        py::arg("scenario"), py::arg("seed"));

    py::class_<RoundRow>(m, "RoundRow")
        .def_readonly("round", &RoundRow::round)
        .def_readonly("initiated_at", &RoundRow::initiated_at)
        .def_readonly("theta_rep", &RoundRow::theta_rep)
        .def_readonly("theta_act", &RoundRow::theta_act)
        .def_readonly("theta_rect", &RoundRow::theta_rect)
        .def_readonly("alphas", &RoundRow::alphas)
        .def_readonly("attacked", &RoundRow::attacked);
    py::class_<DetectionSummary>(m, "DetectionSummary")
        .def_readonly("detected", &DetectionSummary::detected)
        .def_readonly("first_attacked_round", &DetectionSummary::first_attacked_round)
        .def_readonly("start_latency_rounds", &DetectionSummary::start_latency_rounds)
        .def_readonly("end_latency_rounds", &DetectionSummary::end_latency_rounds);
    py::class_<SlaveRunResult>(m, "SlaveRunResult")
        .def_readonly("slave", &SlaveRunResult::slave)
        .def_readonly("redundant_paths", &SlaveRunResult::redundant_paths)
        .def_readonly("rows", &SlaveRunResult::rows)
        .def_readonly("rounds_completed", &SlaveRunResult::rounds_completed)
        .def_readonly("rounds_dropped", &SlaveRunResult::rounds_dropped)
        .def_readonly("late_messages", &SlaveRunResult::late_messages)
        .def_readonly("packets_total", &SlaveRunResult::packets_total)
        .def_readonly("packets_per_cycle", &SlaveRunResult::packets_per_cycle)
        .def_readonly("final_theta_act", &SlaveRunResult::final_theta_act)
        .def_readonly("max_abs_theta_act", &SlaveRunResult::max_abs_theta_act)
        .def_readonly("detection", &SlaveRunResult::detection);
    py::class_<RunOutput>(m, "RunOutput")
        .def_property_readonly("mode",
                               [](const RunOutput& o) { return std::string(to_string(o.mode)); })
        .def_readonly("seed", &RunOutput::seed)
        .def_readonly("rounds_initiated", &RunOutput::rounds_initiated)
        .def_readonly("slaves", &RunOutput::slaves)
        .def("slave", &RunOutput::slave, py::return_value_policy::reference_internal,
             py::arg("name"));
    m.def("run_scenario", &run_scenario, py::arg("scenario"));
    m.def("render_csv", &render_csv, py::arg("result"));
    m.def("render_summary_json", &render_summary_json, py::arg("scenario"), py::arg("output"));
    m.def(
        "emit_outputs",
        [](const RunOutput& out, const Scenario& s, const std::string& dir) {
            emit_outputs(out, s, dir);
        },
        py::arg("output"), py::arg("scenario"), py::arg("out_dir"));
}
