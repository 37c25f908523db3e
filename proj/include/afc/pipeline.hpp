#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "afc/control.hpp"
#include "afc/errors.hpp"
#include "afc/graph.hpp"
#include "afc/io.hpp"
#include "afc/motion.hpp"
#include "afc/presets.hpp"
#include "afc/rng.hpp"
#include "afc/scenario.hpp"
#include "afc/shape.hpp"
#include "afc/sim.hpp"
#include "afc/stress.hpp"

namespace afc {

// Everything a run produces, kept in memory so callers can write files,
// print summaries, or assert on the numbers.
struct RunReport {
    std::string scenario_name;
    int n = 0;
    int m = 0;

    bool user_weights = false;
    StressReport stress_report;
    bool stress_pass = false;

    double h = 0.0;
    double h_min = 0.0;
    double kappa = 1.0;
    bool gain_ok = false;

    unsigned long long seed = 0;
    double perturb_scale = 0.0;
    bool distributed_engine = false;
    Integrator integrator = Integrator::Rk4;
    double dt = 0.0;
    double t_end = 0.0;
    int decimate = 1;

    FrameworkGraph graph;
    ReferenceShape shape;
    StressWeights stress;
    std::vector<std::pair<double, MotionMatrix>> motions;
    ClosedLoop loop;
    Trajectory traj;
    std::vector<MetricsRow> metrics_rows;

    std::vector<double> max_speed;  // per agent, over all samples
    double initial_scale = 0.0;
    double final_scale = 0.0;
    double final_perp = 0.0;
    double wall_seconds = 0.0;

    bool certified() const { return stress_pass && gain_ok; }
    int exit_code() const { return certified() ? 0 : 2; }
};

// Initial configuration p* perturbed by a seeded random affine map:
// A = I + U(-s, s) entrywise (row-major draw order), then b with entries
// U(-2s, 2s). Scale zero reproduces p* exactly.
inline Eigen::VectorXd perturbed_start(const ReferenceShape& shape,
                                       unsigned long long seed, double scale) {
    Uniform rng(seed);
    const int m = shape.dimension();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) A(r, c) += rng.next(-scale, scale);
    }
    Eigen::VectorXd b(m);
    for (int k = 0; k < m; ++k) b(k) = rng.next(-2.0 * scale, 2.0 * scale);
    return affine_image(shape, A, b);
}

inline ReferenceShape resolve_shape(const Scenario& s) {
    if (!s.shape_preset.empty()) return presets::paper8_shape();
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(s.points.size()), s.dim);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        for (int d = 0; d < s.dim; ++d) {
            raw(static_cast<Eigen::Index>(i), d) = s.points[i][d];
        }
    }
    return ReferenceShape::center(raw);
}

// Builds the combined motion parameters of one schedule span: unit-rate
// named generators weighted by their kappa coordinates, plus an optional raw
// (G, v) term.
inline MotionMatrix motion_from_spec(const FrameworkGraph& g,
                                     const ReferenceShape& shape,
                                     const MotionSpec& spec) {
    const int m = shape.dimension();
    std::vector<std::pair<double, MotionMatrix>> parts;
    auto add = [&](double coeff, const VelocityTensor& t) {
        parts.emplace_back(coeff,
                           solve_motion_params(g, shape, velocity_field(shape, t)));
    };
    for (const auto& [coord, value] : spec.kappas) {
        if (coord == "t1") {
            add(value, VelocityTensor::translation(m, 1));
        } else if (coord == "t2") {
            add(value, VelocityTensor::translation(m, 2));
        } else if (coord == "r") {
            add(value, VelocityTensor::rotation2d());
        } else if (coord == "s") {
            add(value, VelocityTensor::scaling(m));
        } else if (coord == "s1") {
            add(value, VelocityTensor::shear(2, 1, 2));
        } else {
            add(value, VelocityTensor::shear(2, 2, 1));
        }
    }
    if (spec.has_G || spec.has_v) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
        if (spec.has_G) {
            for (int r = 0; r < m; ++r) {
                for (int c = 0; c < m; ++c) G(r, c) = spec.G_raw[r * m + c];
            }
        }
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        if (spec.has_v) {
            for (int d = 0; d < m; ++d) v(d) = spec.v_raw[d];
        }
        add(1.0, VelocityTensor::custom(std::move(G), std::move(v)));
    }
    if (parts.empty()) return assemble_motion_matrix(g, {});
    std::vector<std::pair<double, const MotionMatrix*>> terms;
    terms.reserve(parts.size());
    for (const auto& [coeff, mm] : parts) terms.emplace_back(coeff, &mm);
    return combine_motions(g, terms);
}

inline RunReport run_pipeline(const Scenario& s) {
    const auto wall_start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.scenario_name = s.name;
    rep.kappa = s.kappa;
    rep.seed = s.perturb_seed;
    rep.perturb_scale = s.perturb_scale;
    rep.distributed_engine = s.distributed;
    rep.integrator = s.integrator;
    rep.dt = s.dt;
    rep.t_end = s.t_end;
    rep.decimate = s.decimate;

    rep.shape = resolve_shape(s);
    rep.n = rep.shape.agent_count();
    rep.m = rep.shape.dimension();
    rep.graph = FrameworkGraph::build(rep.n, s.edges);
    const AffineSubspaceBasis basis = affine_subspace_basis(rep.shape);

    if (s.has_user_weights()) {
        rep.user_weights = true;
        std::vector<std::tuple<int, int, double>> rows = s.user_weights;
        if (!s.weights_file.empty()) {
            rows = read_weights_csv(s.base_dir + "/" + s.weights_file);
        }
        std::map<std::pair<int, int>, double> wmap;
        for (const auto& [i, j, w] : rows) {
            if (!rep.graph.has_edge(i, j)) {
                throw ValidationError("weights",
                                      "pipeline: weight row (" +
                                          std::to_string(i) + "," +
                                          std::to_string(j) +
                                          ") is not an edge of the graph");
            }
            const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
            if (wmap.count(key)) {
                throw ValidationError("weights",
                                      "pipeline: duplicate weight row (" +
                                          std::to_string(key.first) + "," +
                                          std::to_string(key.second) + ")");
            }
            wmap[key] = w;
        }
        rep.stress.w = edge_weight_vector(rep.graph, wmap);
        rep.stress.laplacian = laplacian_from_weights(rep.graph, rep.stress.w);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.stress.laplacian);
        rep.stress.eigenvalues = es.eigenvalues();
    } else {
        rep.stress = compute_stress_weights(rep.graph, rep.shape);
    }
    rep.stress_report = validate_stress(rep.graph, rep.shape, rep.stress, basis);
    rep.stress_pass = rep.stress_report.pass;

    for (const auto& [t_from, spec] : s.schedule) {
        rep.motions.emplace_back(t_from,
                                 motion_from_spec(rep.graph, rep.shape, spec));
    }

    // Gain bound: worst case over the schedule spans. Skipped when the stress
    // failed its certificate, since the bound presumes a valid kernel.
    const Eigen::MatrixXd B = incidence_matrix(rep.graph);
    rep.h_min = 0.0;
    if (rep.stress_pass && s.kappa != 0.0) {
        for (const auto& [t_from, mm] : rep.motions) {
            const GainCertificate cert = stability_bound(
                rep.stress.laplacian, motion_operator(mm, B), s.kappa, basis,
                rep.m);
            rep.h_min = std::max(rep.h_min, cert.h_min);
        }
    }
    rep.h = s.h_auto ? (rep.h_min > 0.0 ? 2.0 * rep.h_min : 1.0) : s.h;
    rep.gain_ok = rep.stress_pass && rep.h > rep.h_min;

    rep.loop = build_closed_loop(rep.graph, rep.stress, rep.motions, s.kappa,
                                 rep.h, rep.m);

    SimConfig cfg;
    cfg.dt = s.dt;
    cfg.t_end = s.t_end;
    cfg.integrator = s.integrator;
    cfg.p0 = perturbed_start(rep.shape, s.perturb_seed, s.perturb_scale);
    cfg.decimate = s.decimate;
    rep.traj = s.distributed ? run_distributed(rep.loop, cfg)
                             : run_centralized(rep.loop, cfg);
    rep.metrics_rows = compute_metrics(rep.traj, basis, rep.loop);

    rep.max_speed.assign(rep.n, 0.0);
    for (const Eigen::VectorXd& v : rep.traj.velocities) {
        for (int i = 0; i < rep.n; ++i) {
            rep.max_speed[i] = std::max(
                rep.max_speed[i],
                v.segment(static_cast<Eigen::Index>(i) * rep.m, rep.m).norm());
        }
    }
    rep.initial_scale = rep.metrics_rows.front().scale;
    rep.final_scale = rep.metrics_rows.back().scale;
    rep.final_perp = rep.metrics_rows.back().perp_residual;

    rep.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - wall_start)
                           .count();
    return rep;
}

inline std::string summary_text(const RunReport& rep) {
    std::ostringstream out;
    out << "scenario: " << rep.scenario_name << '\n';
    out << "agents: " << rep.n << "  dimension: " << rep.m
        << "  edges: " << rep.graph.edge_count() << '\n';
    out << "engine: " << (rep.distributed_engine ? "distributed" : "centralized")
        << "  integrator: "
        << (rep.integrator == Integrator::Rk4 ? "rk4" : "euler")
        << "  dt: " << detail::fmt(rep.dt)
        << "  t_end: " << detail::fmt(rep.t_end) << '\n';
    out << "perturb seed: " << rep.seed
        << "  perturb scale: " << detail::fmt(rep.perturb_scale) << '\n';
    out << "weights: " << (rep.user_weights ? "user-supplied" : "computed")
        << '\n';
    out << "stress certificate: " << (rep.stress_pass ? "PASS" : "FAIL") << '\n';
    out << "  max equilibrium residual: "
        << detail::fmt(rep.stress_report.max_equilibrium_residual) << '\n';
    out << "  kernel eigenvalue band: "
        << detail::fmt(rep.stress_report.kernel_band) << '\n';
    out << "  smallest eigenvalue: "
        << detail::fmt(rep.stress_report.min_eigenvalue) << '\n';
    out << "  eigenvalue gap: " << detail::fmt(rep.stress_report.lambda_gap)
        << '\n';
    out << "  kernel mismatch: "
        << detail::fmt(rep.stress_report.kernel_mismatch) << '\n';
    out << "kappa: " << detail::fmt(rep.kappa)
        << "  h_min: " << detail::fmt(rep.h_min)
        << "  h: " << detail::fmt(rep.h) << '\n';
    out << "gain: " << (rep.gain_ok ? "certified" : "uncertified gain") << '\n';
    out << "agent max speeds:\n";
    for (int i = 0; i < rep.n; ++i) {
        out << "  agent " << (i + 1) << ": " << detail::fmt(rep.max_speed[i])
            << '\n';
    }
    out << "initial scale: " << detail::fmt(rep.initial_scale) << '\n';
    out << "final scale: " << detail::fmt(rep.final_scale) << '\n';
    out << "final perp residual: " << detail::fmt(rep.final_perp) << '\n';
    out << "samples: " << rep.traj.sample_count() << '\n';
    out << "wall seconds: " << detail::fmt(rep.wall_seconds) << '\n';
    return out.str();
}

// Writes trajectory.csv, metrics.csv, weights.csv, motion CSVs (one per
// schedule span), and summary.txt into out_dir, creating it if needed.
inline void write_outputs(const RunReport& rep, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_trajectory_csv(out_dir + "/trajectory.csv", rep.traj);
    write_metrics_csv(out_dir + "/metrics.csv", rep.metrics_rows, rep.m);
    write_weights_csv(out_dir + "/weights.csv", rep.graph, rep.stress.w);
    for (std::size_t si = 0; si < rep.motions.size(); ++si) {
        const std::string name =
            si == 0 ? "motion.csv" : "motion_" + std::to_string(si + 1) + ".csv";
        write_motion_csv(out_dir + "/" + name, rep.motions[si].second);
    }
    std::ofstream out = detail::open_out(out_dir + "/summary.txt");
    out << summary_text(rep);
}

}  // namespace afc
