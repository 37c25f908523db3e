#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "afc/errors.hpp"
#include "afc/graph.hpp"
#include "afc/linalg.hpp"
#include "afc/shape.hpp"

namespace afc {

// Affine velocity field v(x) = G x + v expressed in the body frame anchored
// at the formation centroid. Named constructors produce the unit-rate
// generator family; custom pairs are accepted for anything else.
struct VelocityTensor {
    Eigen::MatrixXd G;
    Eigen::VectorXd v;

    // Unit translation along coordinate axis k (1-based).
    static VelocityTensor translation(int m, int axis) {
        VelocityTensor t{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
        t.v(axis - 1) = 1.0;
        return t;
    }

    // Rotation at one radian per second in the coordinate plane (a, b),
    // 1-based with a < b, turning axis a toward axis b.
    static VelocityTensor rotation(int m, int a, int b) {
        VelocityTensor t{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
        t.G(b - 1, a - 1) = 1.0;
        t.G(a - 1, b - 1) = -1.0;
        return t;
    }

    // Planar counterclockwise rotation, one radian per second.
    static VelocityTensor rotation2d() { return rotation(2, 1, 2); }

    // Uniform scaling at one current-size per second.
    static VelocityTensor scaling(int m) {
        return {Eigen::MatrixXd::Identity(m, m), Eigen::VectorXd::Zero(m)};
    }

    // Shear feeding coordinate b into coordinate a (1-based, a != b): the
    // hollow elementary matrix with a single 1 at row a, column b.
    static VelocityTensor shear(int m, int a, int b) {
        VelocityTensor t{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
        t.G(a - 1, b - 1) = 1.0;
        return t;
    }

    static VelocityTensor custom(Eigen::MatrixXd G, Eigen::VectorXd v) {
        return {std::move(G), std::move(v)};
    }

    VelocityTensor scaled(double c) const { return {c * G, c * v}; }

    VelocityTensor& operator+=(const VelocityTensor& o) {
        G += o.G;
        v += o.v;
        return *this;
    }
};

// Desired stacked velocities v_i = G p_i + v over the reference shape.
inline Eigen::VectorXd velocity_field(const ReferenceShape& shape,
                                      const VelocityTensor& t) {
    Eigen::MatrixXd V = shape.points() * t.G.transpose();
    V.rowwise() += t.v.transpose();
    return stack(V);
}

// Directed per-edge motion parameters mu_ij (mu_ij and mu_ji are independent)
// together with the assembled node-by-edge matrix M: column k of M holds
// mu_{tail,head} at the tail row and -mu_{head,tail} at the head row.
struct MotionMatrix {
    std::map<std::pair<int, int>, double> mu;  // keys are directed (i, j)
    Eigen::MatrixXd M;                         // |V| x |Z|
};

// Assembles M from a directed parameter map; pairs absent from the map count
// as zero, pairs that are not graph edges are rejected.
inline MotionMatrix assemble_motion_matrix(
    const FrameworkGraph& g, const std::map<std::pair<int, int>, double>& mu) {
    for (const auto& [key, value] : mu) {
        (void)value;
        if (!g.has_edge(key.first, key.second)) {
            throw Error("motion: parameter for non-edge (" +
                        std::to_string(key.first) + "," +
                        std::to_string(key.second) + ")");
        }
    }
    MotionMatrix out;
    out.mu = mu;
    out.M = Eigen::MatrixXd::Zero(g.node_count(), g.edge_count());
    const auto at = [&](int i, int j) {
        auto it = mu.find({i, j});
        return it == mu.end() ? 0.0 : it->second;
    };
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        out.M(e.tail - 1, k) = at(e.tail, e.head);
        out.M(e.head - 1, k) = -at(e.head, e.tail);
    }
    return out;
}

// Solves, agent by agent, sum_j mu_ij (p_i - p_j) = v_i for the desired
// stacked field. Under-determined agents get the minimum-norm solution.
inline MotionMatrix solve_motion_params(const FrameworkGraph& g,
                                        const ReferenceShape& shape,
                                        const Eigen::VectorXd& field) {
    const int n = g.node_count();
    const int m = shape.dimension();
    if (field.size() != n * m) {
        throw Error("motion: field length " + std::to_string(field.size()) +
                    ", expected " + std::to_string(n * m));
    }
    std::map<std::pair<int, int>, double> mu;
    for (int i = 1; i <= n; ++i) {
        const auto& nbrs = g.neighbors(i);
        Eigen::MatrixXd Z(m, nbrs.size());
        for (std::size_t c = 0; c < nbrs.size(); ++c) {
            Z.col(c) = shape.position(i) - shape.position(nbrs[c]);
        }
        const Eigen::VectorXd target = field.segment((i - 1) * m, m);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Z);
        const Eigen::VectorXd sol = cod.solve(target);
        const double residual = (Z * sol - target).norm();
        if (residual > 1e-10 * std::max(1.0, target.norm())) {
            throw InfeasibleAgent(
                i, "motion: agent " + std::to_string(i) +
                       " cannot realize its desired velocity (residual " +
                       std::to_string(residual) +
                       "); neighbor geometry is deficient");
        }
        for (std::size_t c = 0; c < nbrs.size(); ++c) {
            mu[{i, nbrs[c]}] = sol(c);
        }
    }
    return assemble_motion_matrix(g, mu);
}

// Entrywise linear combination sum_k coeff_k M_k; valid because the defining
// per-agent equations are linear in the parameters.
inline MotionMatrix combine_motions(
    const FrameworkGraph& g,
    const std::vector<std::pair<double, const MotionMatrix*>>& terms) {
    std::map<std::pair<int, int>, double> mu;
    for (const auto& [coeff, matrix] : terms) {
        for (const auto& [key, value] : matrix->mu) {
            mu[key] += coeff * value;
        }
    }
    return assemble_motion_matrix(g, mu);
}

// The n-by-n operator M B^T; its block action on stacked configurations
// realizes the designed velocity field.
inline Eigen::MatrixXd motion_operator(const MotionMatrix& motion,
                                       const Eigen::MatrixXd& incidence) {
    return motion.M * incidence.transpose();
}

// Residual of the affine equivariance identity: applying the motion operator
// to any affine image A p* + b of the shape must give A-transformed desired
// velocities. Zero for exact parameters, independent of b.
inline double equivariance_residual(const Eigen::MatrixXd& MBt,
                                    const ReferenceShape& shape,
                                    const Eigen::VectorXd& field,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& b) {
    const int m = shape.dimension();
    const Eigen::VectorXd image = affine_image(shape, A, b);
    const Eigen::VectorXd lhs = apply_block_operator(MBt, image, m);
    const Eigen::VectorXd rhs = stack(unstack(field, m) * A.transpose());
    return (lhs - rhs).norm();
}

}  // namespace afc
