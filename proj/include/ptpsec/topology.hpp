// Graph model of the synchronized network: bidirectional edges with
// independent per-direction delays, ground-truth asymmetry accounting,
// and edge-disjoint path discovery (max-flow with unit capacities).
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptpsec/errors.hpp"
#include "ptpsec/time_units.hpp"

namespace ptpsec {

using NodeId = std::string;

struct Edge {
    std::string id;
    NodeId node_a;
    NodeId node_b;
    DurationNs delay_ab{0}; // forward direction: node_a -> node_b
    DurationNs delay_ba{0}; // reverse direction: node_b -> node_a

    // Ground-truth link asymmetry, forward minus reverse.
    DurationNs asymmetry() const { return delay_ab - delay_ba; }
};

struct PathStep {
    std::string edge_id;
    bool forward{true}; // true: traversed node_a -> node_b
};

struct Path {
    NodeId origin;
    NodeId terminus;
    std::vector<PathStep> steps;

    bool empty() const { return steps.empty(); }
    std::size_t hops() const { return steps.size(); }
};

// Ordered set of pairwise edge-disjoint master-slave paths; index 0 is
// the synchronization path P_0.
struct DisjointPathSet {
    std::vector<Path> paths;

    std::size_t count() const { return paths.size(); }
    // Number of redundant paths n (total paths minus the sync path).
    int redundant_count() const {
        return paths.empty() ? 0 : static_cast<int>(paths.size()) - 1;
    }
};

struct TopologySpec {
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    NodeId master;
    std::vector<NodeId> slaves;
};

class NetworkGraph {
public:
    // Validates and builds the graph. Rejects duplicate node/edge ids,
    // dangling endpoints, self-loops, disconnected graphs, and missing
    // master/slave nodes.
    static NetworkGraph build(TopologySpec spec);

    const std::vector<NodeId>& nodes() const { return spec_.nodes; }
    const std::vector<Edge>& edges() const { return spec_.edges; }
    const NodeId& master() const { return spec_.master; }
    const std::vector<NodeId>& slaves() const { return spec_.slaves; }

    bool has_node(const NodeId& id) const;
    bool has_edge(const std::string& edge_id) const;
    const Edge& edge(const std::string& edge_id) const; // throws unknown_edge
    std::size_t edge_index(const std::string& edge_id) const;

    // Adjacency entry: traversing edge `edge_index` from this node leads
    // to `neighbor`; `forward` tells whether that traversal runs
    // node_a -> node_b. Entries are sorted by (neighbor, edge id) so
    // every search in this module is deterministic.
    struct Adjacency {
        std::size_t edge_index;
        std::size_t neighbor;
        bool forward;
    };
    const std::vector<Adjacency>& adjacent(std::size_t node_index) const;
    std::size_t node_index(const NodeId& id) const; // throws unknown_node
    const NodeId& node_name(std::size_t index) const;

private:
    NetworkGraph() = default;

    TopologySpec spec_;
    std::map<std::string, std::size_t> node_index_;
    std::map<std::string, std::size_t> edge_index_;
    std::vector<std::vector<Adjacency>> adjacency_;
};

// Spec-facing alias for NetworkGraph::build.
NetworkGraph build_graph(TopologySpec spec);

// Throws invalid_route if the path is no valid origin->terminus walk in
// the graph, or reuses an edge; throws unknown_edge for foreign ids.
void validate_path(const NetworkGraph& graph, const Path& path);

// Sum of signed link asymmetries along the path; traversing an edge
// against its forward orientation negates its contribution.
DurationNs true_path_asymmetry(const NetworkGraph& graph, const Path& path);

// Shortest (by hop count, ties by lexicographic node label then edge id)
// source->sink path using only edges with flow == 0. Returns nullopt if
// the sink is unreachable over flow-free edges.
std::optional<Path> zero_flow_path_search(const NetworkGraph& graph,
                                          const std::map<std::string, int>& flow,
                                          const NodeId& source, const NodeId& sink);

// Maximum-cardinality set of pairwise edge-disjoint source->sink paths.
// Cardinality equals the minimum edge cut between the two nodes (unit
// capacities); output order is deterministic. A disconnected pair yields
// an empty set.
DisjointPathSet find_edge_disjoint_paths(const NetworkGraph& graph, const NodeId& source,
                                         const NodeId& sink);

} // namespace ptpsec
