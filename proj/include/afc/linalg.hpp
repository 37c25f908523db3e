#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace afc {

// Configurations are stacked agent-major: p = (p_1^T, ..., p_n^T)^T, so the
// coordinate k of agent i (both 0-based here) lives at index i*m + k. An
// n-by-n operator A acting per coordinate corresponds to kron(A, I_m) on the
// stacked vector.

// Stacked vector -> n-by-m matrix whose row i is agent i's position.
inline Eigen::MatrixXd unstack(const Eigen::VectorXd& p, int m) {
    const int n = static_cast<int>(p.size()) / m;
    Eigen::MatrixXd X(n, m);
    for (int i = 0; i < n; ++i) X.row(i) = p.segment(i * m, m).transpose();
    return X;
}

// n-by-m matrix of agent rows -> stacked vector.
inline Eigen::VectorXd stack(const Eigen::MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    const int m = static_cast<int>(X.cols());
    Eigen::VectorXd p(n * m);
    for (int i = 0; i < n; ++i) p.segment(i * m, m) = X.row(i).transpose();
    return p;
}

// Apply kron(A, I_m) to a stacked configuration without forming the Kronecker
// product: stack(A * unstack(p)).
inline Eigen::VectorXd apply_block_operator(const Eigen::MatrixXd& A,
                                            const Eigen::VectorXd& p, int m) {
    return stack(A * unstack(p, m));
}

// Dense kron(A, I_m), used where a full matrix is genuinely needed
// (eigendecompositions at desk scale).
inline Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& A, int m) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * m, A.cols() * m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < A.cols(); ++j)
            for (int k = 0; k < m; ++k) K(i * m + k, j * m + k) = A(i, j);
    return K;
}

// Largest singular value.
inline double spectral_norm(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues()(0);
}

}  // namespace afc
