#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "afc/control.hpp"
#include "afc/errors.hpp"
#include "afc/graph.hpp"
#include "afc/linalg.hpp"
#include "afc/motion.hpp"
#include "afc/shape.hpp"
#include "afc/stress.hpp"

namespace afc {

// One piecewise-constant span of the closed loop. rows[i] lists agent i+1's
// neighbors (0-based) with the combined control weight w~_ij, ascending by
// neighbor, which fixes the summation order both engines share.
struct Segment {
    double t_from = 0.0;
    std::vector<std::vector<std::pair<int, double>>> rows;
    Eigen::MatrixXd MBt;  // motion operator of this span, kept for metrics
};

// Fully assembled closed loop: gains plus one Segment per schedule span.
struct ClosedLoop {
    int n = 0;
    int m = 0;
    double h = 1.0;
    double kappa = 0.0;
    std::vector<Segment> segments;
    Eigen::MatrixXd laplacian;  // stress Laplacian, shared by every segment
    double lambda_max = 0.0;    // its largest eigenvalue, for the step guard
};

enum class Integrator { Rk4, Euler };

// Message-loss injection for the distributed engine: at global round
// `round`, the z message from `neighbor` to `agent` (both 1-based) is not
// delivered. Rounds count every synchronous exchange from zero in execution
// order. A negative round disables the injection.
struct Dropout {
    long long round = -1;
    int agent = 0;
    int neighbor = 0;
};

struct SimConfig {
    double dt = 1e-3;
    double t_end = 0.0;
    Integrator integrator = Integrator::Rk4;
    Eigen::VectorXd p0;  // stacked initial configuration, length n*m
    int decimate = 100;  // store every decimate-th step plus the final state
    Dropout dropout;
};

// Stored samples. velocities[k] is the right-hand side evaluated at
// states[k], not a finite difference.
struct Trajectory {
    int n = 0;
    int m = 0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> velocities;

    int sample_count() const { return static_cast<int>(times.size()); }
};

struct MetricsRow {
    double t = 0.0;
    double perp_residual = 0.0;
    double vel_error = 0.0;
    Eigen::VectorXd centroid;
    double scale = 0.0;
};

inline ClosedLoop build_closed_loop(
    const FrameworkGraph& g, const StressWeights& stress,
    const std::vector<std::pair<double, MotionMatrix>>& schedule, double kappa,
    double h, int dim) {
    if (!(h > 0.0)) {
        throw NonpositiveGain("sim: gain h must be positive, got " +
                              std::to_string(h));
    }
    if (schedule.empty()) {
        throw ValidationError("schedule", "sim: schedule must have at least one span");
    }
    if (schedule.front().first != 0.0) {
        throw ValidationError("schedule", "sim: first schedule span must start at t = 0");
    }
    for (std::size_t s = 1; s < schedule.size(); ++s) {
        if (!(schedule[s].first > schedule[s - 1].first)) {
            throw ValidationError("schedule",
                                  "sim: schedule switch times must be strictly increasing");
        }
    }

    ClosedLoop loop;
    loop.n = g.node_count();
    loop.m = dim;
    loop.h = h;
    loop.kappa = kappa;
    loop.laplacian = stress.laplacian;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stress.laplacian);
    loop.lambda_max = es.eigenvalues().cwiseAbs().maxCoeff();

    const Eigen::MatrixXd B = incidence_matrix(g);
    for (const auto& [t_from, motion] : schedule) {
        const ModifiedWeights mw = modified_weights(g, stress.w, motion, kappa, h);
        Segment seg;
        seg.t_from = t_from;
        seg.MBt = motion_operator(motion, B);
        seg.rows.resize(loop.n);
        for (int i = 1; i <= loop.n; ++i) {
            for (int j : g.neighbors(i)) {
                seg.rows[i - 1].emplace_back(j - 1, mw.w.at({i, j}));
            }
        }
        loop.segments.push_back(std::move(seg));
    }
    return loop;
}

namespace detail {

// The next five routines carry all of the per-step floating-point work. Both
// engines funnel through them, the centralized one on whole stacked vectors
// and the distributed one on per-agent blocks, so the two trajectories agree
// bit for bit. Elementwise arithmetic is identical either way; the only
// order-sensitive reduction is the neighbor sum, done per agent in both.

inline void gather_offsets(const std::vector<std::pair<int, double>>& row,
                           const double* snapshot, int m, int i, double* z) {
    const double* xi = snapshot + static_cast<std::ptrdiff_t>(i) * m;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double* xj =
            snapshot + static_cast<std::ptrdiff_t>(row[k].first) * m;
        for (int d = 0; d < m; ++d) z[k * m + d] = xi[d] - xj[d];
    }
}

inline void control_from_offsets(const std::vector<std::pair<int, double>>& row,
                                 const double* z, int m, double h, double* u) {
    for (int d = 0; d < m; ++d) u[d] = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double w = row[k].second;
        for (int d = 0; d < m; ++d) u[d] += w * z[k * m + d];
    }
    for (int d = 0; d < m; ++d) u[d] = -h * u[d];
}

inline void stage_state(const double* x, double c, const double* k, int len,
                        double* y) {
    for (int d = 0; d < len; ++d) y[d] = x[d] + c * k[d];
}

inline void rk4_update(double dt_over_6, const double* k1, const double* k2,
                       const double* k3, const double* k4, int len, double* x) {
    for (int d = 0; d < len; ++d) {
        x[d] += dt_over_6 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    }
}

inline void euler_update(double dt, const double* k1, int len, double* x) {
    for (int d = 0; d < len; ++d) x[d] += dt * k1[d];
}

inline long long checked_step_count(double dt, double t_end) {
    const long long N = std::llround(t_end / dt);
    if (std::abs(static_cast<double>(N) * dt - t_end) >
        1e-9 * std::max(1.0, std::abs(t_end))) {
        throw ValidationError("t_end", "sim: t_end must be a multiple of dt");
    }
    return N;
}

inline std::vector<long long> segment_start_steps(const ClosedLoop& loop,
                                                  double dt) {
    std::vector<long long> starts;
    for (const Segment& seg : loop.segments) {
        const long long s = std::llround(seg.t_from / dt);
        if (std::abs(static_cast<double>(s) * dt - seg.t_from) >
            1e-9 * std::max(1.0, std::abs(seg.t_from))) {
            throw ValidationError("schedule",
                                  "sim: schedule switch times must lie on the step grid");
        }
        starts.push_back(s);
    }
    return starts;
}

inline void validate_run(const ClosedLoop& loop, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) {
        throw ValidationError("dt", "sim: dt must be positive");
    }
    if (!(cfg.t_end >= 0.0)) {
        throw ValidationError("t_end", "sim: t_end must be nonnegative");
    }
    if (cfg.decimate < 1) {
        throw ValidationError("decimate", "sim: decimate must be at least 1");
    }
    if (cfg.p0.size() != static_cast<Eigen::Index>(loop.n) * loop.m) {
        throw ValidationError("p0", "sim: initial configuration has length " +
                                        std::to_string(cfg.p0.size()) +
                                        ", expected " +
                                        std::to_string(loop.n * loop.m));
    }
    const double guard = 0.1 / (loop.h * loop.lambda_max);
    if (cfg.dt > guard) {
        throw StepTooLarge("sim: dt = " + std::to_string(cfg.dt) +
                           " exceeds the explicit-integration guard 0.1/(h*lambda_max) = " +
                           std::to_string(guard));
    }
}

inline int active_segment(const std::vector<long long>& starts, long long step) {
    int s = 0;
    while (s + 1 < static_cast<int>(starts.size()) && starts[s + 1] <= step) ++s;
    return s;
}

}  // namespace detail

// Central integration of the whole stacked state. Per stage it evaluates the
// same per-agent control sums the distributed engine uses.
inline Trajectory run_centralized(const ClosedLoop& loop, const SimConfig& cfg) {
    detail::validate_run(loop, cfg);
    const int n = loop.n;
    const int m = loop.m;
    const int len = n * m;
    const long long N = detail::checked_step_count(cfg.dt, cfg.t_end);
    const std::vector<long long> starts = detail::segment_start_steps(loop, cfg.dt);

    std::size_t max_row = 1;
    for (const Segment& seg : loop.segments) {
        for (const auto& row : seg.rows) max_row = std::max(max_row, row.size());
    }
    std::vector<double> z(max_row * static_cast<std::size_t>(m));

    auto eval = [&](const Segment& seg, const double* state, double* rhs) {
        for (int i = 0; i < n; ++i) {
            detail::gather_offsets(seg.rows[i], state, m, i, z.data());
            detail::control_from_offsets(seg.rows[i], z.data(), m, loop.h,
                                         rhs + static_cast<std::ptrdiff_t>(i) * m);
        }
    };

    Eigen::VectorXd x = cfg.p0;
    Eigen::VectorXd k1(len), k2(len), k3(len), k4(len), y(len);
    const double half_dt = 0.5 * cfg.dt;
    const double dt_over_6 = cfg.dt / 6.0;

    Trajectory traj;
    traj.n = n;
    traj.m = m;
    auto record = [&](long long step) {
        traj.times.push_back(static_cast<double>(step) * cfg.dt);
        traj.states.push_back(x);
        traj.velocities.push_back(k1);
    };

    for (long long k = 0; k < N; ++k) {
        const Segment& seg = loop.segments[detail::active_segment(starts, k)];
        eval(seg, x.data(), k1.data());
        if (k % cfg.decimate == 0) record(k);
        if (cfg.integrator == Integrator::Rk4) {
            detail::stage_state(x.data(), half_dt, k1.data(), len, y.data());
            eval(seg, y.data(), k2.data());
            detail::stage_state(x.data(), half_dt, k2.data(), len, y.data());
            eval(seg, y.data(), k3.data());
            detail::stage_state(x.data(), cfg.dt, k3.data(), len, y.data());
            eval(seg, y.data(), k4.data());
            detail::rk4_update(dt_over_6, k1.data(), k2.data(), k3.data(),
                               k4.data(), len, x.data());
        } else {
            detail::euler_update(cfg.dt, k1.data(), len, x.data());
        }
    }
    eval(loop.segments[detail::active_segment(starts, N)], x.data(), k1.data());
    record(N);
    return traj;
}

// Synchronous-round agent simulation. Each agent holds only its own state;
// per round every agent publishes its working position, the network forms
// z_ij = x_i - x_j from that snapshot and delivers it, and each agent applies
// its local control law. A round barrier separates stages.
inline Trajectory run_distributed(const ClosedLoop& loop, const SimConfig& cfg) {
    detail::validate_run(loop, cfg);
    const int n = loop.n;
    const int m = loop.m;
    const long long N = detail::checked_step_count(cfg.dt, cfg.t_end);
    const std::vector<long long> starts = detail::segment_start_steps(loop, cfg.dt);

    struct Agent {
        Eigen::VectorXd x, y, k1, k2, k3, k4;
    };
    std::vector<Agent> agents(n);
    for (int i = 0; i < n; ++i) {
        agents[i].x = cfg.p0.segment(static_cast<Eigen::Index>(i) * m, m);
        agents[i].y.resize(m);
        agents[i].k1.resize(m);
        agents[i].k2.resize(m);
        agents[i].k3.resize(m);
        agents[i].k4.resize(m);
    }

    Eigen::VectorXd snapshot(n * m);
    std::vector<std::vector<double>> zbuf(n);
    std::vector<std::vector<char>> present(n);
    long long round_counter = 0;

    // One exchange: publish every agent's working position, then deliver each
    // agent its neighbor offsets in row order, minus any injected loss.
    auto exchange = [&](const Segment& seg) {
        for (int i = 0; i < n; ++i) {
            snapshot.segment(static_cast<Eigen::Index>(i) * m, m) = agents[i].y;
        }
        for (int i = 0; i < n; ++i) {
            const auto& row = seg.rows[i];
            zbuf[i].resize(row.size() * static_cast<std::size_t>(m));
            present[i].assign(row.size(), 1);
            detail::gather_offsets(row, snapshot.data(), m, i, zbuf[i].data());
            if (round_counter == cfg.dropout.round && i == cfg.dropout.agent - 1) {
                for (std::size_t k = 0; k < row.size(); ++k) {
                    if (row[k].first == cfg.dropout.neighbor - 1) present[i][k] = 0;
                }
            }
        }
        ++round_counter;
    };

    auto agent_control = [&](const Segment& seg, int i, double* out) {
        const auto& row = seg.rows[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!present[i][k]) {
                throw MissingNeighborMeasurement(
                    i + 1, row[k].first + 1,
                    "sim: agent " + std::to_string(i + 1) +
                        " missed the measurement of neighbor " +
                        std::to_string(row[k].first + 1) + " at round " +
                        std::to_string(round_counter - 1));
            }
        }
        detail::control_from_offsets(row, zbuf[i].data(), m, loop.h, out);
    };

    const double half_dt = 0.5 * cfg.dt;
    const double dt_over_6 = cfg.dt / 6.0;

    Trajectory traj;
    traj.n = n;
    traj.m = m;
    auto record = [&](long long step) {
        traj.times.push_back(static_cast<double>(step) * cfg.dt);
        Eigen::VectorXd xs(n * m), vs(n * m);
        for (int i = 0; i < n; ++i) {
            xs.segment(static_cast<Eigen::Index>(i) * m, m) = agents[i].x;
            vs.segment(static_cast<Eigen::Index>(i) * m, m) = agents[i].k1;
        }
        traj.states.push_back(std::move(xs));
        traj.velocities.push_back(std::move(vs));
    };

    for (long long k = 0; k < N; ++k) {
        const Segment& seg = loop.segments[detail::active_segment(starts, k)];
        for (int i = 0; i < n; ++i) agents[i].y = agents[i].x;
        exchange(seg);
        for (int i = 0; i < n; ++i) agent_control(seg, i, agents[i].k1.data());
        if (k % cfg.decimate == 0) record(k);
        if (cfg.integrator == Integrator::Rk4) {
            for (int i = 0; i < n; ++i) {
                detail::stage_state(agents[i].x.data(), half_dt,
                                    agents[i].k1.data(), m, agents[i].y.data());
            }
            exchange(seg);
            for (int i = 0; i < n; ++i) agent_control(seg, i, agents[i].k2.data());
            for (int i = 0; i < n; ++i) {
                detail::stage_state(agents[i].x.data(), half_dt,
                                    agents[i].k2.data(), m, agents[i].y.data());
            }
            exchange(seg);
            for (int i = 0; i < n; ++i) agent_control(seg, i, agents[i].k3.data());
            for (int i = 0; i < n; ++i) {
                detail::stage_state(agents[i].x.data(), cfg.dt,
                                    agents[i].k3.data(), m, agents[i].y.data());
            }
            exchange(seg);
            for (int i = 0; i < n; ++i) agent_control(seg, i, agents[i].k4.data());
            for (int i = 0; i < n; ++i) {
                detail::rk4_update(dt_over_6, agents[i].k1.data(),
                                   agents[i].k2.data(), agents[i].k3.data(),
                                   agents[i].k4.data(), m, agents[i].x.data());
            }
        } else {
            for (int i = 0; i < n; ++i) {
                detail::euler_update(cfg.dt, agents[i].k1.data(), m,
                                     agents[i].x.data());
            }
        }
    }
    {
        const Segment& seg = loop.segments[detail::active_segment(starts, N)];
        for (int i = 0; i < n; ++i) agents[i].y = agents[i].x;
        exchange(seg);
        for (int i = 0; i < n; ++i) agent_control(seg, i, agents[i].k1.data());
        record(N);
    }
    return traj;
}

// Per-sample convergence metrics, computed from the stored samples only.
inline std::vector<MetricsRow> compute_metrics(const Trajectory& traj,
                                               const AffineSubspaceBasis& basis,
                                               const ClosedLoop& loop) {
    std::vector<MetricsRow> out;
    out.reserve(traj.times.size());
    const int n = traj.n;
    const int m = traj.m;
    for (int k = 0; k < traj.sample_count(); ++k) {
        const double t = traj.times[k];
        int s = 0;
        while (s + 1 < static_cast<int>(loop.segments.size()) &&
               loop.segments[s + 1].t_from <= t + 1e-9) {
            ++s;
        }
        const Eigen::VectorXd& p = traj.states[k];
        const Eigen::VectorXd& v = traj.velocities[k];

        MetricsRow row;
        row.t = t;
        row.perp_residual = basis.project_complement(p).norm();
        const Eigen::VectorXd desired =
            loop.kappa * apply_block_operator(loop.segments[s].MBt, p, m);
        row.vel_error = (v - desired).norm();

        const Eigen::MatrixXd X = unstack(p, m);
        row.centroid = X.colwise().mean().transpose();
        Eigen::VectorXd centered = basis.project(p);
        for (int i = 0; i < n; ++i) {
            centered.segment(static_cast<Eigen::Index>(i) * m, m) -= row.centroid;
        }
        row.scale = centered.norm();
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace afc
