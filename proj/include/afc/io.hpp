#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "afc/errors.hpp"
#include "afc/graph.hpp"
#include "afc/motion.hpp"
#include "afc/sim.hpp"

namespace afc {

namespace detail {

// Shortest representation that round-trips the exact double, so re-imported
// files reproduce runs bit for bit and repeated runs are byte-identical.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("io: cannot write '" + path + "'");
    return out;
}

inline std::string coord_name(int d, int m) {
    if (m <= 3) {
        const char* names[] = {"x", "y", "z"};
        return names[d];
    }
    return "x" + std::to_string(d + 1);
}

}  // namespace detail

// One row per agent per sample: t,agent,x,y[,z].
inline void write_trajectory_csv(const std::string& path,
                                 const Trajectory& traj) {
    std::ofstream out = detail::open_out(path);
    out << "t,agent";
    for (int d = 0; d < traj.m; ++d) out << ',' << detail::coord_name(d, traj.m);
    out << '\n';
    for (int k = 0; k < traj.sample_count(); ++k) {
        for (int i = 0; i < traj.n; ++i) {
            out << detail::fmt(traj.times[k]) << ',' << (i + 1);
            for (int d = 0; d < traj.m; ++d) {
                out << ',' << detail::fmt(traj.states[k](i * traj.m + d));
            }
            out << '\n';
        }
    }
}

// One row per sample: t,perp_residual,vel_error,centroid_*,scale.
inline void write_metrics_csv(const std::string& path,
                              const std::vector<MetricsRow>& rows, int m) {
    std::ofstream out = detail::open_out(path);
    out << "t,perp_residual,vel_error";
    for (int d = 0; d < m; ++d) out << ",centroid_" << detail::coord_name(d, m);
    out << ",scale\n";
    for (const MetricsRow& r : rows) {
        out << detail::fmt(r.t) << ',' << detail::fmt(r.perp_residual) << ','
            << detail::fmt(r.vel_error);
        for (int d = 0; d < m; ++d) out << ',' << detail::fmt(r.centroid(d));
        out << ',' << detail::fmt(r.scale) << '\n';
    }
}

// One row per undirected edge: i,j,w with i < j in edge-set order.
inline void write_weights_csv(const std::string& path, const FrameworkGraph& g,
                              const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != g.edge_count()) {
        throw MissingWeight("io: expected " + std::to_string(g.edge_count()) +
                            " weights, got " + std::to_string(w.size()));
    }
    std::ofstream out = detail::open_out(path);
    out << "i,j,w\n";
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        out << e.head << ',' << e.tail << ',' << detail::fmt(w[k]) << '\n';
    }
}

// One row per directed parameter: i,j,mu. Both orientations of an edge may
// appear since the parameters are directional.
inline void write_motion_csv(const std::string& path,
                             const MotionMatrix& motion) {
    std::ofstream out = detail::open_out(path);
    out << "i,j,mu\n";
    for (const auto& [key, value] : motion.mu) {
        out << key.first << ',' << key.second << ',' << detail::fmt(value)
            << '\n';
    }
}

// Reads i,j,w rows; a leading header line is skipped. Used both for the
// weights round trip and for scenario files that point at a weights CSV.
inline std::vector<std::tuple<int, int, double>> read_weights_csv(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io: cannot read '" + path + "'");
    std::vector<std::tuple<int, int, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') ||
            !std::getline(ls, c)) {
            throw ParseError(lineno, "io: '" + path + "' line " +
                                         std::to_string(lineno) +
                                         ": expected i,j,w");
        }
        if (lineno == 1 && a == "i") continue;
        try {
            std::size_t pa = 0, pb = 0, pc = 0;
            const int i = std::stoi(a, &pa);
            const int j = std::stoi(b, &pb);
            const double w = std::stod(c, &pc);
            if (pa != a.size() || pb != b.size() || pc != c.size()) {
                throw std::invalid_argument("trailing characters");
            }
            rows.emplace_back(i, j, w);
        } catch (const std::exception&) {
            throw ParseError(lineno, "io: '" + path + "' line " +
                                         std::to_string(lineno) +
                                         ": malformed i,j,w row");
        }
    }
    return rows;
}

}  // namespace afc
