#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "afc/errors.hpp"
#include "afc/linalg.hpp"

namespace afc {

// Centered generic reference configuration: n agent positions in R^m whose
// center of mass is the origin and whose affine span is all of R^m.
class ReferenceShape {
public:
    // Centers the raw positions (rows are agents) and verifies genericity.
    // Genericity proxy: the (m+1)-by-n matrix with columns [p_i; 1] must have
    // smallest singular value above 1e-8 times its largest.
    static ReferenceShape center(const Eigen::MatrixXd& raw_positions) {
        const int n = static_cast<int>(raw_positions.rows());
        const int m = static_cast<int>(raw_positions.cols());
        if (m < 1) throw DegenerateShape("shape: ambient dimension must be >= 1");
        if (n < m + 2) {
            throw TooFewAgents("shape: need at least " + std::to_string(m + 2) +
                               " agents in dimension " + std::to_string(m) +
                               ", got " + std::to_string(n));
        }
        ReferenceShape s;
        s.points_ = raw_positions.rowwise() - raw_positions.colwise().mean();
        Eigen::MatrixXd aug(m + 1, n);
        aug.topRows(m) = s.points_.transpose();
        aug.row(m).setOnes();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(aug);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-8 * sv(0)) {
            throw DegenerateShape(
                "shape: affine span is deficient (singular value ratio " +
                std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
        }
        return s;
    }

    int agent_count() const { return static_cast<int>(points_.rows()); }
    int dimension() const { return static_cast<int>(points_.cols()); }

    // Centered positions, one agent per row.
    const Eigen::MatrixXd& points() const { return points_; }

    // Position of a 1-based agent.
    Eigen::VectorXd position(int i) const {
        return points_.row(i - 1).transpose();
    }

    // Agent-major stacked vector of length n*m.
    Eigen::VectorXd stacked() const { return stack(points_); }

private:
    Eigen::MatrixXd points_;
};

// Configuration obtained by applying x -> A x + b to every reference position.
inline Eigen::VectorXd affine_image(const ReferenceShape& shape,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& b) {
    Eigen::MatrixXd X = shape.points() * A.transpose();
    X.rowwise() += b.transpose();
    return stack(X);
}

// Orthonormal basis of the space S of affine images of the reference shape,
// dimension m^2 + m, together with the projectors onto S and its orthogonal
// complement.
class AffineSubspaceBasis {
public:
    explicit AffineSubspaceBasis(Eigen::MatrixXd V) : V_(std::move(V)) {}

    int dimension() const { return static_cast<int>(V_.cols()); }
    const Eigen::MatrixXd& vectors() const { return V_; }

    Eigen::MatrixXd projector() const { return V_ * V_.transpose(); }
    Eigen::MatrixXd projector_complement() const {
        const auto mn = V_.rows();
        return Eigen::MatrixXd::Identity(mn, mn) - V_ * V_.transpose();
    }

    // Component of p inside S.
    Eigen::VectorXd project(const Eigen::VectorXd& p) const {
        return V_ * (V_.transpose() * p);
    }

    // Component of p orthogonal to S.
    Eigen::VectorXd project_complement(const Eigen::VectorXd& p) const {
        return p - project(p);
    }

private:
    Eigen::MatrixXd V_;
};

// Builds the basis from the spanning set {stacked E_kl-images of p*} followed
// by the m pure translations, orthonormalized in that fixed order by modified
// Gram-Schmidt so the projectors are reproducible. E_kl runs row-major
// (E_11, E_12, ..., E_mm).
inline AffineSubspaceBasis affine_subspace_basis(const ReferenceShape& shape) {
    const int n = shape.agent_count();
    const int m = shape.dimension();
    const int mn = n * m;
    const int dim_expected = m * m + m;
    Eigen::MatrixXd raw(mn, dim_expected);
    int col = 0;
    for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l, ++col) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(mn);
            for (int i = 0; i < n; ++i) v(i * m + k) = shape.points()(i, l);
            raw.col(col) = v;
        }
    }
    for (int k = 0; k < m; ++k, ++col) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(mn);
        for (int i = 0; i < n; ++i) v(i * m + k) = 1.0;
        raw.col(col) = v;
    }

    const double scale = raw.colwise().norm().maxCoeff();
    Eigen::MatrixXd V(mn, dim_expected);
    int kept = 0;
    for (int c = 0; c < dim_expected; ++c) {
        Eigen::VectorXd v = raw.col(c);
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < kept; ++j) v -= V.col(j).dot(v) * V.col(j);
        }
        const double norm = v.norm();
        if (norm <= 1e-8 * scale) continue;
        V.col(kept++) = v / norm;
    }
    if (kept != dim_expected) {
        throw RankDeficient("shape: affine-image space has dimension " +
                            std::to_string(kept) + ", expected " +
                            std::to_string(dim_expected));
    }
    return AffineSubspaceBasis(V);
}

// Orthogonal split p = p_parallel + p_perp with p_parallel in S.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> decompose(
    const AffineSubspaceBasis& basis, const Eigen::VectorXd& p) {
    Eigen::VectorXd par = basis.project(p);
    return {par, p - par};
}

}  // namespace afc
