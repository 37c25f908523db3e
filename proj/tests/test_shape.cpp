#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "afc/linalg.hpp"
#include "afc/presets.hpp"
#include "afc/shape.hpp"
#include "fixtures.hpp"

TEST_CASE("centering preserves an already centered configuration") {
    const auto shape = afc::presets::paper8_shape();
    CHECK(shape.agent_count() == 8);
    CHECK(shape.dimension() == 2);
    const auto& pts = afc::presets::paper8_points();
    for (int i = 1; i <= 8; ++i) {
        CHECK((shape.position(i) - pts[i - 1]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(shape.points().colwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("centering moves a unit square onto the origin") {
    const auto shape = fixtures::labeled_square();
    CHECK(shape.position(1).isApprox(Eigen::Vector2d(-0.5, -0.5)));
    CHECK(shape.position(2).isApprox(Eigen::Vector2d(-0.5, 0.5)));
    CHECK(shape.position(3).isApprox(Eigen::Vector2d(0.5, 0.5)));
    CHECK(shape.position(4).isApprox(Eigen::Vector2d(0.5, -0.5)));
}

TEST_CASE("stacked vectors are agent major") {
    const auto shape = fixtures::labeled_square();
    const Eigen::VectorXd p = shape.stacked();
    REQUIRE(p.size() == 8);
    CHECK(p(0) == -0.5);
    CHECK(p(1) == -0.5);
    CHECK(p(2) == -0.5);
    CHECK(p(3) == 0.5);
    CHECK(afc::stack(afc::unstack(p, 2)).isApprox(p));
}

TEST_CASE("degenerate and undersized configurations are rejected") {
    Eigen::MatrixXd collinear(4, 2);
    collinear << 0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0;
    CHECK_THROWS_AS(afc::ReferenceShape::center(collinear), afc::DegenerateShape);

    Eigen::MatrixXd three(3, 2);
    three << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(afc::ReferenceShape::center(three), afc::TooFewAgents);

    Eigen::MatrixXd lone(1, 1);
    lone << 0.0;
    CHECK_THROWS_AS(afc::ReferenceShape::center(lone), afc::TooFewAgents);
}

TEST_CASE("affine images transform every agent position") {
    const auto shape = afc::presets::paper8_shape();
    const Eigen::VectorXd same = afc::affine_image(
        shape, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
    CHECK((same - shape.stacked()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::Matrix2d quarter_turn;
    quarter_turn << 0.0, -1.0, 1.0, 0.0;
    const Eigen::VectorXd turned =
        afc::affine_image(shape, quarter_turn, Eigen::Vector2d::Zero());
    CHECK(turned.segment(6, 2).isApprox(Eigen::Vector2d(0.0, 2.0)));

    const Eigen::VectorXd shifted = afc::affine_image(
        shape, 2.0 * Eigen::Matrix2d::Identity(), Eigen::Vector2d(1.0, -1.0));
    CHECK(shifted.segment(0, 2).isApprox(Eigen::Vector2d(-1.0, 1.0)));
}

TEST_CASE("affine-image basis has dimension m squared plus m") {
    CHECK(afc::affine_subspace_basis(afc::presets::paper8_shape()).dimension() ==
          6);
    CHECK(afc::affine_subspace_basis(fixtures::shape3d()).dimension() == 12);
    CHECK(afc::affine_subspace_basis(fixtures::line4()).dimension() == 2);
}

TEST_CASE("projector onto the affine-image space is an orthogonal projector") {
    const auto basis = afc::affine_subspace_basis(fixtures::labeled_square());
    const Eigen::MatrixXd P = basis.projector();
    CHECK(std::abs(P.trace() - 6.0) < 1e-12);
    CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P + basis.projector_complement() -
           Eigen::MatrixXd::Identity(8, 8))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("decomposition splits configurations orthogonally") {
    const auto shape = afc::presets::paper8_shape();
    const auto basis = afc::affine_subspace_basis(shape);

    const auto [par0, perp0] = afc::decompose(basis, shape.stacked());
    CHECK(perp0.norm() < 1e-10);
    CHECK((par0 - shape.stacked()).norm() < 1e-10);

    Eigen::Matrix2d A;
    A << 1.3, -0.4, 0.2, 0.8;
    const Eigen::VectorXd image =
        afc::affine_image(shape, A, Eigen::Vector2d(0.7, -2.0));
    CHECK(afc::decompose(basis, image).second.norm() < 1e-10);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(16);
    v(0) = 1.0;
    v = basis.project_complement(v).normalized();
    const auto [par1, perp1] = afc::decompose(
        basis, Eigen::VectorXd(shape.stacked() + v));
    CHECK(std::abs(perp1.norm() - 1.0) < 1e-12);
    CHECK((par1 - shape.stacked()).norm() < 1e-10);

    const Eigen::VectorXd a = image + 2.0 * v;
    const auto [pa, qa] = afc::decompose(basis, a);
    CHECK((pa + qa - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(pa.dot(qa)) < 1e-10);
}

TEST_CASE("block operator application matches the dense Kronecker form") {
    const auto shape = afc::presets::paper8_shape();
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(8, 8);
    const Eigen::VectorXd p = shape.stacked();
    const Eigen::VectorXd lhs = afc::apply_block_operator(A, p, 2);
    const Eigen::VectorXd rhs = afc::kron_identity(A, 2) * p;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}
