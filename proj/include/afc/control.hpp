#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "afc/errors.hpp"
#include "afc/graph.hpp"
#include "afc/linalg.hpp"
#include "afc/motion.hpp"
#include "afc/shape.hpp"
#include "afc/stress.hpp"

namespace afc {

// Directed control weights w~_ij = w_ij - (kappa/h) mu_ij. Each agent runs
// u_i = -h sum_j w~_ij (p_i - p_j) using only relative measurements; the
// motion term is folded into the weights, which is what makes the scheme
// distributed.
struct ModifiedWeights {
    double h = 1.0;
    double kappa = 0.0;
    std::map<std::pair<int, int>, double> w;  // directed (i, j), j a neighbor of i
};

inline ModifiedWeights modified_weights(const FrameworkGraph& g,
                                        const std::vector<double>& stress_w,
                                        const MotionMatrix& motion, double kappa,
                                        double h) {
    if (!(h > 0.0)) {
        throw NonpositiveGain("control: gain h must be positive, got " +
                              std::to_string(h));
    }
    if (static_cast<int>(stress_w.size()) != g.edge_count()) {
        throw MissingWeight("control: expected " +
                            std::to_string(g.edge_count()) + " weights, got " +
                            std::to_string(stress_w.size()));
    }
    ModifiedWeights out;
    out.h = h;
    out.kappa = kappa;
    const double ratio = kappa / h;
    for (int i = 1; i <= g.node_count(); ++i) {
        for (int j : g.neighbors(i)) {
            const double wij = stress_w[g.edge_index(i, j)];
            auto it = motion.mu.find({i, j});
            const double mu = it == motion.mu.end() ? 0.0 : it->second;
            out.w[{i, j}] = wij - ratio * mu;
        }
    }
    return out;
}

// L~ = L - (kappa/h) M B^T. Not symmetric in general, but its rows still sum
// to zero because both terms annihilate the all-ones direction on the right.
inline Eigen::MatrixXd modified_laplacian(const Eigen::MatrixXd& L,
                                          const Eigen::MatrixXd& MBt,
                                          double kappa, double h) {
    if (!(h > 0.0)) {
        throw NonpositiveGain("control: gain h must be positive, got " +
                              std::to_string(h));
    }
    return L - (kappa / h) * MBt;
}

// Control input of one agent from its own neighbor measurements
// z_ij = p_i - p_j, supplied as (neighbor, measurement) pairs. Every neighbor
// listed in the graph must be measured.
inline Eigen::VectorXd agent_control_input(
    const FrameworkGraph& g, int i,
    const std::vector<std::pair<int, Eigen::VectorXd>>& measurements,
    const ModifiedWeights& weights) {
    std::map<int, const Eigen::VectorXd*> by_neighbor;
    for (const auto& [j, z] : measurements) by_neighbor[j] = &z;
    Eigen::VectorXd u;
    for (int j : g.neighbors(i)) {
        auto it = by_neighbor.find(j);
        if (it == by_neighbor.end()) {
            throw MissingNeighborMeasurement(
                i, j, "control: agent " + std::to_string(i) +
                          " has no measurement of neighbor " + std::to_string(j));
        }
        const Eigen::VectorXd& z = *it->second;
        if (u.size() == 0) u = Eigen::VectorXd::Zero(z.size());
        u += weights.w.at({i, j}) * z;
    }
    if (u.size() == 0) {
        throw Error("control: agent " + std::to_string(i) + " has no neighbors");
    }
    return -weights.h * u;
}

// Gain certificate for the closed loop. h_min is the sufficient lower bound
// on h: with the stress Laplacian eigendecomposed kernel-first, the nonzero
// eigenvalues form a diagonal block J2, Q = diag(1/lambda) solves
// Q J2 + J2 Q = 2 I, and the bound is |kappa| times the spectral norm of Q
// applied to the trailing block of the motion operator in the eigenbasis.
struct GainCertificate {
    double h_min = 0.0;
    double kappa = 0.0;
    Eigen::VectorXd nonzero_eigenvalues;  // of the expanded stress Laplacian
    double block_norm = 0.0;              // spectral norm of Q times the block
    double q_residual = 0.0;              // || Q J2 + J2 Q - 2 I ||

    bool certifies(double h) const { return h > h_min; }
};

inline GainCertificate stability_bound(const Eigen::MatrixXd& L,
                                       const Eigen::MatrixXd& MBt, double kappa,
                                       const AffineSubspaceBasis& basis,
                                       int dim) {
    const int n = static_cast<int>(L.rows());
    const int m = dim;
    const int mn = n * m;
    const int d_parallel = m * m + m;
    const int d_perp = mn - d_parallel;

    const Eigen::MatrixXd Lbar = kron_identity(L, m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lbar);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const Eigen::MatrixXd& V = es.eigenvectors();

    // The ascending order puts the kernel first; it must agree with the
    // affine-image basis or the stress was not valid for this shape.
    if (ev.head(d_parallel).cwiseAbs().maxCoeff() > 1e-8 ||
        ev(d_parallel) < 1e-8) {
        throw KernelMismatch(
            "control: stress Laplacian kernel dimension disagrees with the "
            "affine-image space");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> angles(V.leftCols(d_parallel).transpose() *
                                             basis.vectors());
    if (angles.singularValues().minCoeff() < 1.0 - 1e-8) {
        throw KernelMismatch(
            "control: stress Laplacian kernel differs from the affine-image "
            "space beyond tolerance");
    }

    GainCertificate cert;
    cert.kappa = kappa;
    cert.nonzero_eigenvalues = ev.tail(d_perp);
    if (kappa == 0.0) return cert;  // h_min = 0, any positive h certified

    const Eigen::VectorXd q = cert.nonzero_eigenvalues.cwiseInverse();
    const Eigen::MatrixXd transformed =
        V.transpose() * kron_identity(MBt, m) * V;
    const Eigen::MatrixXd block =
        transformed.bottomRightCorner(d_perp, d_perp);
    const Eigen::MatrixXd scaled = q.asDiagonal() * block;
    cert.block_norm = spectral_norm(scaled);
    cert.h_min = std::abs(kappa) * cert.block_norm;

    const Eigen::MatrixXd J2 = cert.nonzero_eigenvalues.asDiagonal();
    cert.q_residual = (q.asDiagonal() * J2 + J2 * q.asDiagonal() -
                       2.0 * Eigen::MatrixXd::Identity(d_perp, d_perp))
                          .norm();
    return cert;
}

}  // namespace afc
