#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "glb/errors.hpp"
#include "glb/types.hpp"

namespace glb::flow {

/// Directed graph with edge capacities and a maximum-flow solver (Dinic's
/// blocking-flow algorithm). The graph itself is immutable once built;
/// `max_flow` keeps its residual state local to the call.
template <typename Capacity>
class basic_network {
    static_assert(std::is_arithmetic_v<Capacity>);

public:
    struct Edge {
        std::size_t from;
        std::size_t to;
        Capacity capacity;
    };

    explicit basic_network(std::size_t nodes = 0) : nodes_(nodes) {}

    std::size_t add_node() { return nodes_++; }

    std::size_t add_edge(std::size_t from, std::size_t to, Capacity capacity) {
        if (from >= nodes_ || to >= nodes_) {
            throw ValidationError("edge", "", "edge endpoint out of range");
        }
        if (capacity < Capacity{0}) {
            throw ValidationError("capacity", "", "negative edge capacity");
        }
        edges_.push_back({from, to, capacity});
        return edges_.size() - 1;
    }

    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Value of a maximum `source` to `sink` flow. Residual capacities at or
    /// below `eps` count as saturated.
    [[nodiscard]] Capacity max_flow(std::size_t source, std::size_t sink,
                                    Capacity eps = Capacity{0}) const {
        if (source >= nodes_ || sink >= nodes_) {
            throw ValidationError("node", "", "source or sink out of range");
        }
        if (source == sink) {
            return Capacity{0};
        }
        Solver s(*this, eps);
        return s.run(source, sink);
    }

    /// Capacity of the cut whose source side is `source_side`.
    [[nodiscard]] Capacity cut_capacity(const std::vector<bool>& source_side) const {
        Capacity total{0};
        for (const auto& e : edges_) {
            if (source_side.at(e.from) && !source_side.at(e.to)) {
                total += e.capacity;
            }
        }
        return total;
    }

private:
    struct Arc {
        std::size_t to;
        std::size_t rev;
        Capacity residual;
    };

    class Solver {
    public:
        Solver(const basic_network& g, Capacity eps) : adj_(g.nodes_), level_(g.nodes_), it_(g.nodes_), eps_(eps) {
            for (const auto& e : g.edges_) {
                const std::size_t fi = adj_[e.from].size();
                const std::size_t ti = adj_[e.to].size() + (e.from == e.to ? 1 : 0);
                adj_[e.from].push_back({e.to, ti, e.capacity});
                adj_[e.to].push_back({e.from, fi, Capacity{0}});
            }
        }

        Capacity run(std::size_t s, std::size_t t) {
            Capacity total{0};
            while (bfs(s, t)) {
                std::fill(it_.begin(), it_.end(), 0);
                for (;;) {
                    const Capacity pushed = dfs(s, t, std::numeric_limits<Capacity>::max());
                    if (!(pushed > eps_)) {
                        break;
                    }
                    total += pushed;
                }
            }
            return total;
        }

    private:
        bool bfs(std::size_t s, std::size_t t) {
            constexpr std::size_t unseen = std::numeric_limits<std::size_t>::max();
            std::fill(level_.begin(), level_.end(), unseen);
            std::queue<std::size_t> q;
            level_[s] = 0;
            q.push(s);
            while (!q.empty()) {
                const std::size_t v = q.front();
                q.pop();
                for (const auto& a : adj_[v]) {
                    if (a.residual > eps_ && level_[a.to] == unseen) {
                        level_[a.to] = level_[v] + 1;
                        q.push(a.to);
                    }
                }
            }
            return level_[t] != unseen;
        }

        // Recursion depth is bounded by the BFS level of the sink.
        Capacity dfs(std::size_t v, std::size_t t, Capacity limit) {
            if (v == t) {
                return limit;
            }
            for (std::size_t& i = it_[v]; i < adj_[v].size(); ++i) {
                Arc& a = adj_[v][i];
                if (!(a.residual > eps_) || level_[a.to] != level_[v] + 1) {
                    continue;
                }
                const Capacity pushed = dfs(a.to, t, std::min(limit, a.residual));
                if (pushed > eps_) {
                    a.residual -= pushed;
                    adj_[a.to][a.rev].residual += pushed;
                    return pushed;
                }
            }
            return Capacity{0};
        }

        std::vector<std::vector<Arc>> adj_;
        std::vector<std::size_t> level_;
        std::vector<std::size_t> it_;
        Capacity eps_;
    };

    std::size_t nodes_;
    std::vector<Edge> edges_;
};

using network = basic_network<double>;

/// Information flow graph of one front end and N data centers: the front end
/// (source) feeds every data center's in-node with its allocated workload;
/// in-node to out-node carries the data center's SLA upper bound; every
/// out-node reaches the data collector (sink) without limit.
struct FlowGraph {
    network net;
    std::size_t source = 0;
    std::size_t sink = 0;
    std::vector<std::size_t> in_node;
    std::vector<std::size_t> out_node;
    /// Capacity standing in for "unbounded" on out-node to sink edges.
    double unbounded = 0.0;

    [[nodiscard]] std::size_t dc_count() const noexcept { return in_node.size(); }
};

/// Flow tolerance in requests/second.
inline constexpr double flow_tolerance = rate_tolerance;

[[nodiscard]] inline FlowGraph build_graph(std::span<const double> aw, std::span<const double> ub) {
    if (aw.size() != ub.size()) {
        throw ValidationError("aw", "", "allocated workload and upper bound lengths differ");
    }
    auto check = [](double v, const char* field) {
        if (!(v >= 0.0) || v == std::numeric_limits<double>::infinity()) {
            throw ValidationError(field, "", std::string(field) + " capacity negative or not finite");
        }
    };
    double big = 1.0;
    for (std::size_t i = 0; i < aw.size(); ++i) {
        check(aw[i], "aw");
        check(ub[i], "ub");
        big += aw[i] + ub[i];
    }

    FlowGraph g;
    g.unbounded = 2.0 * big;
    g.source = g.net.add_node();
    for (std::size_t i = 0; i < aw.size(); ++i) {
        g.in_node.push_back(g.net.add_node());
        g.out_node.push_back(g.net.add_node());
    }
    g.sink = g.net.add_node();
    for (std::size_t i = 0; i < aw.size(); ++i) {
        g.net.add_edge(g.source, g.in_node[i], aw[i]);
        g.net.add_edge(g.in_node[i], g.out_node[i], ub[i]);
        g.net.add_edge(g.out_node[i], g.sink, g.unbounded);
    }
    return g;
}

/// Front end to data collector maximum flow, equal to the minimum cut.
[[nodiscard]] inline double max_flow(const FlowGraph& g) {
    return g.net.max_flow(g.source, g.sink, 0.0);
}

/// Whether routing `aw` lets every one of `demand` requests/second reach the
/// collector within the deadline bounds `ub`.
[[nodiscard]] inline bool feasible(std::span<const double> aw, std::span<const double> ub,
                                   double demand) {
    if (!(demand > 0.0)) {
        return true;
    }
    return max_flow(build_graph(aw, ub)) >= demand - flow_tolerance;
}

} // namespace glb::flow
