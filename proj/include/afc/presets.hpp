#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "afc/graph.hpp"
#include "afc/shape.hpp"

namespace afc::presets {

// Eight agents on a unit grid forming a ragged octagon, centered at the
// origin. Shipped under the name "paper8".
inline const std::vector<Eigen::Vector2d>& paper8_points() {
    static const std::vector<Eigen::Vector2d> pts = {
        {-1.0, 1.0},  {0.0, 1.0},   {1.0, 1.0},  {2.0, 0.0},
        {1.0, -1.0},  {0.0, -1.0},  {-1.0, -1.0}, {-2.0, 0.0}};
    return pts;
}

inline ReferenceShape paper8_shape() {
    const auto& pts = paper8_points();
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) raw.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
    return ReferenceShape::center(raw);
}

// Edge list of the shipped paper8 framework. This graph admits a positive
// semidefinite stress with the required rank on the paper8 shape; agent 4 has
// six neighbors.
inline const std::vector<std::pair<int, int>>& paper8_edges() {
    static const std::vector<std::pair<int, int>> edges = {
        {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 8}, {2, 4}, {2, 7}, {3, 4}, {3, 5},
        {3, 6}, {4, 5}, {4, 6}, {4, 8}, {5, 7}, {5, 8}, {6, 8}, {7, 8}};
    return edges;
}

inline bool shape_preset_exists(const std::string& name) {
    return name == "paper8";
}

struct ScenarioPreset {
    const char* name;
    const char* summary;
    const char* text;
};

inline const std::vector<ScenarioPreset>& scenario_presets() {
    static const std::vector<ScenarioPreset> presets = {
        {"fig3",
         "shaped consensus: the formation contracts while orbiting its fixed "
         "centroid (kappa_s = kappa_r = -1)",
         R"(# Shaped consensus: the formation contracts while orbiting its fixed centroid.
[shape]
preset = paper8

[graph]
edges = 1-2, 1-3, 1-4, 1-5, 1-8, 2-4, 2-7, 3-4, 3-5, 3-6, 4-5, 4-6, 4-8, 5-7, 5-8, 6-8, 7-8

[motion]
kappa_s = -1
kappa_r = -1

[gains]
h = auto
kappa = 1

[sim]
dt = 0.001
t_end = 250
integrator = rk4
engine = centralized
perturb_seed = 1
perturb_scale = 0.2

[output]
decimate = 100
)"},
        {"fig4",
         "exponential expansion with spin and horizontal drift (kappa_s = "
         "kappa_r = kappa_t1 = 1)",
         R"(# Expanding spiral: the formation grows and spins while drifting horizontally.
[shape]
preset = paper8

[graph]
edges = 1-2, 1-3, 1-4, 1-5, 1-8, 2-4, 2-7, 3-4, 3-5, 3-6, 4-5, 4-6, 4-8, 5-7, 5-8, 6-8, 7-8

[motion]
kappa_s = 1
kappa_r = 1
kappa_t1 = 1

[gains]
h = auto
kappa = 1

[sim]
dt = 0.001
t_end = 250
integrator = rk4
engine = centralized
perturb_seed = 1
perturb_scale = 0.2

[output]
decimate = 100
)"},
        {"fig5",
         "closed orbit: unit spin plus unit horizontal translation (kappa_r = "
         "kappa_t1 = 1)",
         R"(# Closed orbit: spinning at one radian per second while translating horizontally.
[shape]
preset = paper8

[graph]
edges = 1-2, 1-3, 1-4, 1-5, 1-8, 2-4, 2-7, 3-4, 3-5, 3-6, 4-5, 4-6, 4-8, 5-7, 5-8, 6-8, 7-8

[motion]
kappa_r = 1
kappa_t1 = 1

[gains]
h = auto
kappa = 1

[sim]
dt = 0.001
t_end = 350
integrator = rk4
engine = centralized
perturb_seed = 1
perturb_scale = 0.2

[output]
decimate = 100
)"},
        {"fig6",
         "pure horizontal shear from the reference shape: the middle agents "
         "stay put (kappa_s1 = 1)",
         R"(# Pure shear: rows slide horizontally in proportion to height, agents on the axis stop.
[shape]
preset = paper8

[graph]
edges = 1-2, 1-3, 1-4, 1-5, 1-8, 2-4, 2-7, 3-4, 3-5, 3-6, 4-5, 4-6, 4-8, 5-7, 5-8, 6-8, 7-8

[motion]
kappa_s1 = 1

[gains]
h = auto
kappa = 1

[sim]
dt = 0.001
t_end = 250
integrator = rk4
engine = centralized
perturb_seed = 1
perturb_scale = 0

[output]
decimate = 100
)"}};
    return presets;
}

inline const ScenarioPreset* find_scenario(const std::string& name) {
    for (const auto& p : scenario_presets()) {
        if (name == p.name) return &p;
    }
    return nullptr;
}

inline std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& p : scenario_presets()) names.emplace_back(p.name);
    return names;
}

}  // namespace afc::presets
