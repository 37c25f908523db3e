#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "afc/graph.hpp"
#include "afc/presets.hpp"
#include "afc/shape.hpp"

namespace fixtures {

// Unit square with corners listed counterclockwise from the bottom-left, so
// agent 1 sits at (-1/2, -1/2) after centering.
inline afc::ReferenceShape labeled_square() {
    Eigen::MatrixXd raw(4, 2);
    raw << 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0;
    return afc::ReferenceShape::center(raw);
}

inline afc::FrameworkGraph square_complete() {
    return afc::FrameworkGraph::build(
        4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
}

inline afc::FrameworkGraph square_cycle() {
    return afc::FrameworkGraph::build(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
}

// Four collinear points with a cycle graph: the smallest framework here that
// carries a one-dimensional stress space, with a closed-form optimum.
inline afc::ReferenceShape line4() {
    Eigen::MatrixXd raw(4, 1);
    raw << 0.0, 1.0, 2.0, 3.0;
    return afc::ReferenceShape::center(raw);
}

inline afc::FrameworkGraph line4_cycle() {
    return afc::FrameworkGraph::build(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
}

// Generic five-point configuration in three dimensions.
inline afc::ReferenceShape shape3d() {
    Eigen::MatrixXd raw(5, 3);
    raw << 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0,
        1.0, 1.0;
    return afc::ReferenceShape::center(raw);
}

// Fifteen-edge variant of the paper8 framework that admits no positive
// semidefinite stress of the required rank; kept as the search failure
// fixture. It is the shipped edge list minus {1,8} and {3,4}.
inline std::vector<std::pair<int, int>> paper8_deficient_edges() {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : afc::presets::paper8_edges()) {
        if (e == std::pair<int, int>{1, 8} || e == std::pair<int, int>{3, 4}) {
            continue;
        }
        edges.push_back(e);
    }
    return edges;
}

inline afc::FrameworkGraph paper8_graph() {
    return afc::FrameworkGraph::build(8, afc::presets::paper8_edges());
}

inline afc::FrameworkGraph complete_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) edges.emplace_back(i, j);
    }
    return afc::FrameworkGraph::build(n, edges);
}

}  // namespace fixtures
