#include "ptpsec/topology.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace ptpsec {

NetworkGraph NetworkGraph::build(TopologySpec spec) {
    NetworkGraph g;

    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& name = spec.nodes[i];
        if (name.empty())
            throw SimError(Errc::validation_error, "empty node label");
        if (!g.node_index_.emplace(name, i).second)
            throw SimError(Errc::duplicate_node, "node '" + name + "' declared twice");
    }

    for (std::size_t i = 0; i < spec.edges.size(); ++i) {
        const auto& e = spec.edges[i];
        if (e.id.empty())
            throw SimError(Errc::validation_error, "empty edge id");
        if (!g.edge_index_.emplace(e.id, i).second)
            throw SimError(Errc::duplicate_edge, "edge '" + e.id + "' declared twice");
        if (!g.node_index_.count(e.node_a) || !g.node_index_.count(e.node_b))
            throw SimError(Errc::unknown_endpoint,
                           "edge '" + e.id + "' references an undeclared node");
        if (e.node_a == e.node_b)
            throw SimError(Errc::validation_error, "edge '" + e.id + "' is a self-loop");
        if (e.delay_ab < 0 || e.delay_ba < 0)
            throw SimError(Errc::validation_error, "edge '" + e.id + "' has a negative delay");
    }

    if (!g.node_index_.count(spec.master))
        throw SimError(Errc::unknown_node, "master '" + spec.master + "' is not a declared node");
    if (spec.slaves.empty())
        throw SimError(Errc::no_master_slave_path, "no slave node configured");
    for (const auto& s : spec.slaves) {
        if (!g.node_index_.count(s))
            throw SimError(Errc::unknown_node, "slave '" + s + "' is not a declared node");
        if (s == spec.master)
            throw SimError(Errc::validation_error, "slave '" + s + "' equals the master");
    }

    g.spec_ = std::move(spec);

    // Adjacency sorted by (neighbor label, edge id): the tie-break that
    // makes every BFS in this module deterministic.
    g.adjacency_.resize(g.spec_.nodes.size());
    for (std::size_t ei = 0; ei < g.spec_.edges.size(); ++ei) {
        const auto& e = g.spec_.edges[ei];
        std::size_t a = g.node_index_.at(e.node_a);
        std::size_t b = g.node_index_.at(e.node_b);
        g.adjacency_[a].push_back({ei, b, true});
        g.adjacency_[b].push_back({ei, a, false});
    }
    for (auto& adj : g.adjacency_) {
        std::sort(adj.begin(), adj.end(), [&g](const Adjacency& x, const Adjacency& y) {
            const auto& nx = g.spec_.nodes[x.neighbor];
            const auto& ny = g.spec_.nodes[y.neighbor];
            if (nx != ny)
                return nx < ny;
            return g.spec_.edges[x.edge_index].id < g.spec_.edges[y.edge_index].id;
        });
    }

    // Connectivity over the whole graph (the model assumes it).
    if (!g.spec_.nodes.empty()) {
        std::vector<char> seen(g.spec_.nodes.size(), 0);
        std::deque<std::size_t> queue{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (const auto& adj : g.adjacency_[v]) {
                if (!seen[adj.neighbor]) {
                    seen[adj.neighbor] = 1;
                    ++reached;
                    queue.push_back(adj.neighbor);
                }
            }
        }
        if (reached != g.spec_.nodes.size())
            throw SimError(Errc::disconnected, "graph is not connected");
    }

    // Connectivity implies a master-slave path for every slave, except in
    // the degenerate single-node case caught above via slave checks; a
    // master with no incident edges and one node total lands here.
    if (g.adjacency_[g.node_index_.at(g.spec_.master)].empty())
        throw SimError(Errc::no_master_slave_path,
                       "master '" + g.spec_.master + "' has no incident edges");

    return g;
}

bool NetworkGraph::has_node(const NodeId& id) const { return node_index_.count(id) != 0; }

bool NetworkGraph::has_edge(const std::string& edge_id) const {
    return edge_index_.count(edge_id) != 0;
}

const Edge& NetworkGraph::edge(const std::string& edge_id) const {
    auto it = edge_index_.find(edge_id);
    if (it == edge_index_.end())
        throw SimError(Errc::unknown_edge, "edge '" + edge_id + "'");
    return spec_.edges[it->second];
}

std::size_t NetworkGraph::edge_index(const std::string& edge_id) const {
    auto it = edge_index_.find(edge_id);
    if (it == edge_index_.end())
        throw SimError(Errc::unknown_edge, "edge '" + edge_id + "'");
    return it->second;
}

const std::vector<NetworkGraph::Adjacency>& NetworkGraph::adjacent(std::size_t node_index) const {
    return adjacency_.at(node_index);
}

std::size_t NetworkGraph::node_index(const NodeId& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end())
        throw SimError(Errc::unknown_node, "node '" + id + "'");
    return it->second;
}

const NodeId& NetworkGraph::node_name(std::size_t index) const { return spec_.nodes.at(index); }

NetworkGraph build_graph(TopologySpec spec) { return NetworkGraph::build(std::move(spec)); }

void validate_path(const NetworkGraph& graph, const Path& path) {
    if (path.steps.empty())
        throw SimError(Errc::invalid_route, "empty path");
    std::set<std::string> used;
    NodeId at = path.origin;
    if (!graph.has_node(at))
        throw SimError(Errc::unknown_node, "path origin '" + at + "'");
    for (const auto& step : path.steps) {
        const Edge& e = graph.edge(step.edge_id);
        if (!used.insert(step.edge_id).second)
            throw SimError(Errc::invalid_route, "edge '" + step.edge_id + "' repeated in path");
        const NodeId& from = step.forward ? e.node_a : e.node_b;
        const NodeId& to = step.forward ? e.node_b : e.node_a;
        if (from != at)
            throw SimError(Errc::invalid_route,
                           "step over '" + step.edge_id + "' does not continue from '" + at + "'");
        at = to;
    }
    if (at != path.terminus)
        throw SimError(Errc::invalid_route, "path ends at '" + at + "', expected terminus '" +
                                                path.terminus + "'");
}

DurationNs true_path_asymmetry(const NetworkGraph& graph, const Path& path) {
    DurationNs total = 0;
    for (const auto& step : path.steps) {
        const Edge& e = graph.edge(step.edge_id);
        total += step.forward ? e.asymmetry() : -e.asymmetry();
    }
    return total;
}

namespace {

// BFS over arcs admitted by `usable(edge_index, forward)`. Adjacency is
// pre-sorted, so the first discovered shortest path is the
// lexicographically smallest one.
std::optional<Path> bfs_path(const NetworkGraph& graph, std::size_t source, std::size_t sink,
                             const std::function<bool(std::size_t, bool)>& usable) {
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent_node(graph.nodes().size(), none);
    std::vector<std::size_t> parent_edge(graph.nodes().size(), none);
    std::vector<char> parent_forward(graph.nodes().size(), 0);
    std::vector<char> seen(graph.nodes().size(), 0);

    std::deque<std::size_t> queue{source};
    seen[source] = 1;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        if (v == sink)
            break;
        for (const auto& adj : graph.adjacent(v)) {
            if (seen[adj.neighbor] || !usable(adj.edge_index, adj.forward))
                continue;
            seen[adj.neighbor] = 1;
            parent_node[adj.neighbor] = v;
            parent_edge[adj.neighbor] = adj.edge_index;
            parent_forward[adj.neighbor] = adj.forward ? 1 : 0;
            queue.push_back(adj.neighbor);
        }
    }
    if (!seen[sink])
        return std::nullopt;

    Path path;
    path.origin = graph.node_name(source);
    path.terminus = graph.node_name(sink);
    std::vector<PathStep> reversed;
    for (std::size_t v = sink; v != source; v = parent_node[v])
        reversed.push_back({graph.edges()[parent_edge[v]].id, parent_forward[v] != 0});
    path.steps.assign(reversed.rbegin(), reversed.rend());
    return path;
}

} // namespace

std::optional<Path> zero_flow_path_search(const NetworkGraph& graph,
                                          const std::map<std::string, int>& flow,
                                          const NodeId& source, const NodeId& sink) {
    for (const auto& e : graph.edges()) {
        if (!flow.count(e.id))
            throw SimError(Errc::validation_error, "flow value missing for edge '" + e.id + "'");
    }
    std::size_t s = graph.node_index(source);
    std::size_t t = graph.node_index(sink);
    if (s == t)
        throw SimError(Errc::validation_error, "source equals sink");
    return bfs_path(graph, s, t, [&](std::size_t edge_index, bool) {
        return flow.at(graph.edges()[edge_index].id) == 0;
    });
}

DisjointPathSet find_edge_disjoint_paths(const NetworkGraph& graph, const NodeId& source,
                                         const NodeId& sink) {
    std::size_t s = graph.node_index(source);
    std::size_t t = graph.node_index(sink);
    if (s == t)
        throw SimError(Errc::validation_error, "source equals sink");

    // Signed unit flow per undirected edge: +1 used node_a->node_b,
    // -1 used node_b->node_a. Traversing an arc whose flow already runs
    // the other way cancels it, which is what lets the search rebuild
    // around an earlier, badly placed path (plain greedy zero-flow
    // search can undershoot the max-flow cardinality).
    std::vector<int> flow(graph.edges().size(), 0);
    auto residual_ok = [&](std::size_t edge_index, bool forward) {
        return forward ? flow[edge_index] < 1 : flow[edge_index] > -1;
    };

    while (auto augmenting = bfs_path(graph, s, t, residual_ok)) {
        for (const auto& step : augmenting->steps)
            flow[graph.edge_index(step.edge_id)] += step.forward ? 1 : -1;
    }

    // Decompose the final flow into paths: repeatedly walk from the
    // source along unused support arcs, always picking the first entry
    // in the sorted adjacency. Flow conservation guarantees each walk
    // reaches the sink; leftover circulation (if any) belongs to no
    // source->sink path and is ignored.
    std::vector<char> consumed(graph.edges().size(), 0);
    DisjointPathSet result;
    while (true) {
        Path path;
        path.origin = graph.node_name(s);
        path.terminus = graph.node_name(t);
        std::size_t at = s;
        bool started = false;
        while (at != t || !started) {
            const NetworkGraph::Adjacency* next = nullptr;
            for (const auto& adj : graph.adjacent(at)) {
                if (consumed[adj.edge_index])
                    continue;
                int want = adj.forward ? 1 : -1;
                if (flow[adj.edge_index] == want) {
                    next = &adj;
                    break;
                }
            }
            if (next == nullptr)
                break;
            consumed[next->edge_index] = 1;
            path.steps.push_back({graph.edges()[next->edge_index].id, next->forward});
            at = next->neighbor;
            started = true;
        }
        if (started && at == t)
            result.paths.push_back(std::move(path));
        else
            break;
    }
    return result;
}

} // namespace ptpsec
