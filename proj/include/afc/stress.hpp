#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "afc/errors.hpp"
#include "afc/graph.hpp"
#include "afc/linalg.hpp"
#include "afc/shape.hpp"

namespace afc {

// Symmetric edge weights whose Laplacian is positive semidefinite with rank
// n - m - 1 and kernel equal to the affine-image space of the reference
// shape. Weights are normalized so the smallest nonzero eigenvalue is 1.
struct StressWeights {
    std::vector<double> w;        // aligned with the graph's ordered edge set
    Eigen::MatrixXd laplacian;    // n-by-n
    Eigen::VectorXd eigenvalues;  // ascending
};

// Certificate data produced by validate_stress. pass is the conjunction of
// the individual checks; the scalar fields carry the measured margins.
struct StressReport {
    double max_equilibrium_residual = 0.0;  // tolerance 1e-9
    double kernel_band = 0.0;               // max |lambda_1..m+1|, tolerance 1e-10
    double min_eigenvalue = 0.0;            // must exceed -1e-10
    double lambda_gap = 0.0;                // lambda_{m+2}, must exceed 1e-8
    double kernel_mismatch = 0.0;           // max column norm of Lbar * V_S, tol 1e-9
    bool equilibrium_ok = false;
    bool psd_ok = false;
    bool rank_ok = false;
    bool kernel_ok = false;
    bool pass = false;
};

// Per-agent norms of the weighted relative-position sums
// r_i = || sum_j w_ij (p_i - p_j) ||. A stress makes every r_i vanish.
inline Eigen::VectorXd equilibrium_residuals(const FrameworkGraph& g,
                                             const ReferenceShape& shape,
                                             const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != g.edge_count()) {
        throw MissingWeight("stress: expected " + std::to_string(g.edge_count()) +
                            " weights, got " + std::to_string(w.size()));
    }
    const int n = g.node_count();
    const int m = shape.dimension();
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, m);
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        const Eigen::VectorXd d =
            shape.position(e.head) - shape.position(e.tail);
        sums.row(e.head - 1) += w[k] * d.transpose();
        sums.row(e.tail - 1) -= w[k] * d.transpose();
    }
    return sums.rowwise().norm();
}

namespace detail {

// Linear map from edge weights to the stacked equilibrium sums; its null
// space is the space of stresses of the framework.
inline Eigen::MatrixXd equilibrium_map(const FrameworkGraph& g,
                                       const ReferenceShape& shape) {
    const int n = g.node_count();
    const int m = shape.dimension();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n * m, g.edge_count());
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        const Eigen::VectorXd d =
            shape.position(e.head) - shape.position(e.tail);
        E.block((e.head - 1) * m, k, m, 1) = d;
        E.block((e.tail - 1) * m, k, m, 1) = -d;
    }
    return E;
}

// Orthonormal basis of the complement of span{1, coordinate columns of p*}.
// Every candidate Laplacian annihilates that span, so restricting to the
// complement removes the always-zero eigenvalues from the search objective.
inline Eigen::MatrixXd kernel_complement(const ReferenceShape& shape) {
    const int n = shape.agent_count();
    const int m = shape.dimension();
    Eigen::MatrixXd A(n, m + 1);
    A.col(0).setOnes();
    A.rightCols(m) = shape.points();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return Q.rightCols(n - m - 1);
}

}  // namespace detail

// Computes stress weights by (a) a singular-value null-space basis of the
// equilibrium map, then (b) projected gradient ascent on the unit sphere of
// basis coefficients, maximizing the smallest eigenvalue of the candidate
// Laplacian restricted to the complement of its forced kernel. That
// restricted minimum equals the (m+2)-th ascending eigenvalue wherever the
// candidate is admissible, and has no gradient plateau elsewhere. Multi-start
// seeds are the canonical coefficient directions, their pairwise sums, and
// the negations of both, capped at 2 r^2 starts; ties between starts keep the
// earliest. The result is normalized so lambda_{m+2} = 1.
inline StressWeights compute_stress_weights(const FrameworkGraph& g,
                                            const ReferenceShape& shape) {
    const int n = g.node_count();
    const int m = shape.dimension();
    if (n != shape.agent_count()) {
        throw ValidationError("agents", "stress: graph has " +
                                            std::to_string(n) +
                                            " nodes but shape has " +
                                            std::to_string(shape.agent_count()));
    }
    if (n < m + 2) {
        throw TooFewAgents("stress: need at least " + std::to_string(m + 2) +
                           " agents in dimension " + std::to_string(m));
    }
    const int z = g.edge_count();
    const Eigen::MatrixXd E = detail::equilibrium_map(g, shape);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-10 * sv(0)) ++rank;
    }
    const int r = z - rank;
    if (r <= 0) {
        throw NullSpaceEmpty(
            "stress: the equilibrium constraints admit only the zero solution");
    }
    const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(r);

    // Restricted candidates R(c) = sum_k c_k U^T L_k U with L_k the Laplacian
    // of the k-th null-basis weight vector.
    const Eigen::MatrixXd U = detail::kernel_complement(shape);
    const int q = n - m - 1;
    std::vector<Eigen::MatrixXd> restricted(r);
    for (int k = 0; k < r; ++k) {
        std::vector<double> wk(null_basis.rows());
        for (int e = 0; e < z; ++e) wk[e] = null_basis(e, k);
        restricted[k] = U.transpose() * laplacian_from_weights(g, wk) * U;
    }
    const auto assemble = [&](const Eigen::VectorXd& c) {
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(q, q);
        for (int k = 0; k < r; ++k) R += c(k) * restricted[k];
        return R;
    };
    const auto objective = [&](const Eigen::VectorXd& c) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble(c));
        return es.eigenvalues()(0);
    };

    std::vector<Eigen::VectorXd> seeds;
    for (int i = 0; i < r; ++i) seeds.push_back(Eigen::VectorXd::Unit(r, i));
    for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
            seeds.push_back((Eigen::VectorXd::Unit(r, i) +
                             Eigen::VectorXd::Unit(r, j)) /
                            std::sqrt(2.0));
        }
    }
    const std::size_t base = seeds.size();
    for (std::size_t i = 0; i < base; ++i) seeds.push_back(-seeds[i]);
    const std::size_t budget = static_cast<std::size_t>(2 * r * r);
    if (seeds.size() > budget && budget > 0) seeds.resize(budget);

    double best_f = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_c;
    for (const auto& seed : seeds) {
        Eigen::VectorXd c = seed.normalized();
        double f = objective(c);
        for (int iter = 0; iter < 400; ++iter) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble(c));
            const Eigen::VectorXd u0 = es.eigenvectors().col(0);
            Eigen::VectorXd grad(r);
            for (int k = 0; k < r; ++k) grad(k) = u0.dot(restricted[k] * u0);
            Eigen::VectorXd tangent = grad - grad.dot(c) * c;
            const double tnorm2 = tangent.squaredNorm();
            if (tnorm2 < 1e-24) break;
            double step = 1.0;
            bool moved = false;
            while (step > 1e-13) {
                Eigen::VectorXd c2 = (c + step * tangent).normalized();
                const double f2 = objective(c2);
                if (f2 > f + 1e-4 * step * tnorm2) {
                    c = c2;
                    f = f2;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (f > best_f + 1e-15) {
            best_f = f;
            best_c = c;
        }
    }

    if (!(best_f > 1e-6)) {
        throw NoValidStress(
            "stress: no positive semidefinite stress of rank " +
            std::to_string(q) + " found (best margin " + std::to_string(best_f) +
            "); the framework is likely not universally rigid");
    }

    StressWeights result;
    const Eigen::VectorXd coeffs = null_basis * best_c;
    result.w.assign(coeffs.data(), coeffs.data() + coeffs.size());
    Eigen::MatrixXd L = laplacian_from_weights(g, result.w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    const double gap = es.eigenvalues()(m + 1);
    for (auto& wi : result.w) wi /= gap;
    result.laplacian = laplacian_from_weights(g, result.w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(result.laplacian);
    result.eigenvalues = es2.eigenvalues();
    return result;
}

// Checks all stress invariants against the shape and its affine-image basis
// and reports the measured margins. Never throws; pass/fail is in the report.
inline StressReport validate_stress(const FrameworkGraph& g,
                                    const ReferenceShape& shape,
                                    const StressWeights& sw,
                                    const AffineSubspaceBasis& basis) {
    const int m = shape.dimension();
    StressReport rep;
    rep.max_equilibrium_residual =
        equilibrium_residuals(g, shape, sw.w).maxCoeff();
    rep.equilibrium_ok = rep.max_equilibrium_residual < 1e-9;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sw.laplacian);
    const Eigen::VectorXd& ev = es.eigenvalues();
    rep.min_eigenvalue = ev(0);
    rep.kernel_band = ev.head(m + 1).cwiseAbs().maxCoeff();
    rep.lambda_gap = ev(m + 1);
    rep.psd_ok = rep.min_eigenvalue > -1e-10;
    rep.rank_ok = rep.kernel_band < 1e-10 && rep.lambda_gap > 1e-8;

    double mismatch = 0.0;
    for (int c = 0; c < basis.dimension(); ++c) {
        mismatch = std::max(
            mismatch,
            apply_block_operator(sw.laplacian, basis.vectors().col(c), m).norm());
    }
    rep.kernel_mismatch = mismatch;
    rep.kernel_ok = mismatch < 1e-9;

    rep.pass = rep.equilibrium_ok && rep.psd_ok && rep.rank_ok && rep.kernel_ok;
    return rep;
}

}  // namespace afc
