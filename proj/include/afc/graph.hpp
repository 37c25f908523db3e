#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "afc/errors.hpp"

namespace afc {

// One undirected edge stored with a fixed orientation: head is the smaller
// node index, tail the larger, so every derived matrix is deterministic.
// Node indices are 1-based everywhere in the public API.
struct Edge {
    int head;
    int tail;
};

// Undirected, connected graph with an ordered edge set and per-node neighbor
// sets. Immutable after construction.
class FrameworkGraph {
public:
    static FrameworkGraph build(int n,
                                const std::vector<std::pair<int, int>>& edge_list) {
        if (n < 1) throw Error("graph: node count must be positive");
        FrameworkGraph g;
        g.n_ = n;
        g.neighbors_.assign(n + 1, {});
        std::map<std::pair<int, int>, int> seen;
        for (const auto& [a, b] : edge_list) {
            if (a < 1 || a > n || b < 1 || b > n) {
                throw Error("graph: node index out of range in edge (" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
            }
            if (a == b) {
                throw SelfLoop("graph: self-loop at node " + std::to_string(a));
            }
            const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            if (seen.count(key)) {
                throw DuplicateEdge("graph: duplicate edge (" +
                                    std::to_string(key.first) + "," +
                                    std::to_string(key.second) + ")");
            }
            seen[key] = static_cast<int>(g.edges_.size());
            g.edges_.push_back({key.first, key.second});
            g.neighbors_[a].push_back(b);
            g.neighbors_[b].push_back(a);
        }
        for (int i = 1; i <= n; ++i) {
            std::sort(g.neighbors_[i].begin(), g.neighbors_[i].end());
        }
        g.edge_index_ = std::move(seen);
        g.check_connected();
        return g;
    }

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    // Sorted neighbor set of a 1-based node.
    const std::vector<int>& neighbors(int i) const { return neighbors_.at(i); }
    int degree(int i) const { return static_cast<int>(neighbors_.at(i).size()); }

    bool has_edge(int i, int j) const {
        return edge_index_.count({std::min(i, j), std::max(i, j)}) > 0;
    }

    // Position of the undirected pair {i,j} in the ordered edge set.
    int edge_index(int i, int j) const {
        auto it = edge_index_.find({std::min(i, j), std::max(i, j)});
        if (it == edge_index_.end()) {
            throw Error("graph: no edge (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
        }
        return it->second;
    }

private:
    void check_connected() const {
        if (n_ == 1) return;
        std::vector<char> visited(n_ + 1, 0);
        std::queue<int> frontier;
        frontier.push(1);
        visited[1] = 1;
        int reached = 1;
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            for (int v : neighbors_[u]) {
                if (!visited[v]) {
                    visited[v] = 1;
                    ++reached;
                    frontier.push(v);
                }
            }
        }
        if (reached != n_) {
            throw DisconnectedGraph("graph: only " + std::to_string(reached) +
                                    " of " + std::to_string(n_) +
                                    " nodes reachable from node 1");
        }
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> neighbors_;
    std::map<std::pair<int, int>, int> edge_index_;
};

// Node-by-edge incidence matrix: column k carries +1 at the tail of edge k,
// -1 at the head, zeros elsewhere, so every column sums to zero.
inline Eigen::MatrixXd incidence_matrix(const FrameworkGraph& g) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.node_count(), g.edge_count());
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        B(e.head - 1, k) = -1.0;
        B(e.tail - 1, k) = 1.0;
    }
    return B;
}

// Weighted Laplacian from one weight per edge, aligned with the ordered edge
// set: l_ii sums the incident weights, l_ij = -w_ij on edges. Row sums are
// zero by construction and the result is exactly symmetric.
inline Eigen::MatrixXd laplacian_from_weights(const FrameworkGraph& g,
                                              const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != g.edge_count()) {
        throw MissingWeight("graph: expected " + std::to_string(g.edge_count()) +
                            " edge weights, got " + std::to_string(w.size()));
    }
    const int n = g.node_count();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        const int a = e.head - 1, b = e.tail - 1;
        L(a, b) -= w[k];
        L(b, a) -= w[k];
        L(a, a) += w[k];
        L(b, b) += w[k];
    }
    return L;
}

// Same, from a map keyed by undirected node pairs; a pair may appear under
// either orientation. Every edge of the graph must be covered.
inline Eigen::MatrixXd laplacian_from_weights(
    const FrameworkGraph& g, const std::map<std::pair<int, int>, double>& w) {
    std::vector<double> flat(g.edge_count());
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        auto it = w.find({e.head, e.tail});
        if (it == w.end()) it = w.find({e.tail, e.head});
        if (it == w.end()) {
            throw MissingWeight("graph: no weight for edge (" +
                                std::to_string(e.head) + "," +
                                std::to_string(e.tail) + ")");
        }
        flat[k] = it->second;
    }
    return laplacian_from_weights(g, flat);
}

// Flatten a pair-keyed weight map into edge order, with the same coverage
// check as the Laplacian builder.
inline std::vector<double> edge_weight_vector(
    const FrameworkGraph& g, const std::map<std::pair<int, int>, double>& w) {
    std::vector<double> flat(g.edge_count());
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        auto it = w.find({e.head, e.tail});
        if (it == w.end()) it = w.find({e.tail, e.head});
        if (it == w.end()) {
            throw MissingWeight("graph: no weight for edge (" +
                                std::to_string(e.head) + "," +
                                std::to_string(e.tail) + ")");
        }
        flat[k] = it->second;
    }
    return flat;
}

}  // namespace afc
