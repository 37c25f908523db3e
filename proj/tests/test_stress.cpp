#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "afc/rng.hpp"
#include "afc/shape.hpp"
#include "afc/stress.hpp"
#include "fixtures.hpp"

TEST_CASE("equilibrium residuals vanish for zero weights") {
    const auto g = fixtures::square_complete();
    const auto shape = fixtures::labeled_square();
    const Eigen::VectorXd r =
        afc::equilibrium_residuals(g, shape, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(r.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uniform weights on the complete square are far from equilibrium") {
    const auto g = fixtures::square_complete();
    const auto shape = fixtures::labeled_square();
    const Eigen::VectorXd r =
        afc::equilibrium_residuals(g, shape, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
    REQUIRE(r.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(r(i) == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
    }
}

TEST_CASE("residual computation requires one weight per edge") {
    const auto g = fixtures::square_complete();
    const auto shape = fixtures::labeled_square();
    CHECK_THROWS_AS(afc::equilibrium_residuals(g, shape, {1.0, 1.0}),
                    afc::MissingWeight);
}

TEST_CASE("computed paper8 stress satisfies every certificate clause") {
    const auto g = fixtures::paper8_graph();
    const auto shape = afc::presets::paper8_shape();
    const auto sw = afc::compute_stress_weights(g, shape);

    REQUIRE(static_cast<int>(sw.w.size()) == 17);
    CHECK(afc::equilibrium_residuals(g, shape, sw.w).maxCoeff() < 1e-9);

    REQUIRE(sw.eigenvalues.size() == 8);
    CHECK(sw.eigenvalues.head(3).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sw.eigenvalues(3) == Catch::Approx(1.0).margin(1e-9));
    const double expected[] = {2.885665, 4.329765, 8.675328, 13.116521};
    for (int i = 0; i < 4; ++i) {
        CHECK(sw.eigenvalues(4 + i) ==
              Catch::Approx(expected[i]).epsilon(1e-3));
    }

    const auto basis = afc::affine_subspace_basis(shape);
    const auto report = afc::validate_stress(g, shape, sw, basis);
    CHECK(report.pass);
    CHECK(report.equilibrium_ok);
    CHECK(report.psd_ok);
    CHECK(report.rank_ok);
    CHECK(report.kernel_ok);
    CHECK(report.lambda_gap == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("stress Laplacian annihilates random affine images") {
    const auto g = fixtures::paper8_graph();
    const auto shape = afc::presets::paper8_shape();
    const auto sw = afc::compute_stress_weights(g, shape);
    afc::Uniform rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix2d A;
        Eigen::Vector2d b;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) A(r, c) = rng.next(-1.0, 1.0);
        }
        for (int r = 0; r < 2; ++r) b(r) = rng.next(-1.0, 1.0);
        const Eigen::VectorXd image = afc::affine_image(shape, A, b);
        CHECK(afc::apply_block_operator(sw.laplacian, image, 2).norm() < 1e-8);
    }
}

TEST_CASE("collinear cycle stress has the closed-form optimum") {
    const auto g = fixtures::line4_cycle();
    const auto shape = fixtures::line4();
    const auto sw = afc::compute_stress_weights(g, shape);
    REQUIRE(sw.w.size() == 4);
    CHECK(sw.w[0] == Catch::Approx(0.5).margin(1e-9));
    CHECK(sw.w[1] == Catch::Approx(0.5).margin(1e-9));
    CHECK(sw.w[2] == Catch::Approx(0.5).margin(1e-9));
    CHECK(sw.w[3] == Catch::Approx(-1.0 / 6.0).margin(1e-9));
    CHECK(sw.eigenvalues(2) == Catch::Approx(1.0).margin(1e-9));
    CHECK(sw.eigenvalues(3) == Catch::Approx(5.0 / 3.0).margin(1e-9));
}

TEST_CASE("complete-graph stress kernel equals the affine-image space") {
    const auto g = fixtures::complete_graph(8);
    const auto shape = afc::presets::paper8_shape();
    const auto sw = afc::compute_stress_weights(g, shape);
    const auto basis = afc::affine_subspace_basis(shape);
    const auto report = afc::validate_stress(g, shape, sw, basis);
    CHECK(report.pass);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        afc::kron_identity(sw.laplacian, 2));
    Eigen::JacobiSVD<Eigen::MatrixXd> angles(
        es.eigenvectors().leftCols(6).transpose() * basis.vectors());
    CHECK(angles.singularValues().minCoeff() > 1.0 - 1e-6);
}

TEST_CASE("stress search reports failure modes distinctly") {
    const auto shape = afc::presets::paper8_shape();
    const auto deficient =
        afc::FrameworkGraph::build(8, fixtures::paper8_deficient_edges());
    CHECK_THROWS_AS(afc::compute_stress_weights(deficient, shape),
                    afc::NoValidStress);

    const auto cycle = fixtures::square_cycle();
    CHECK_THROWS_AS(afc::compute_stress_weights(cycle, fixtures::labeled_square()),
                    afc::NullSpaceEmpty);

    const auto triangle =
        afc::FrameworkGraph::build(3, {{1, 2}, {1, 3}, {2, 3}});
    Eigen::MatrixXd pts(3, 2);
    pts << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(
        afc::compute_stress_weights(triangle, afc::ReferenceShape::center(pts)),
        afc::TooFewAgents);

    CHECK_THROWS_AS(
        afc::compute_stress_weights(fixtures::square_complete(), shape),
        afc::ValidationError);
}

TEST_CASE("validation flags perturbed and zero weight vectors") {
    const auto g = fixtures::paper8_graph();
    const auto shape = afc::presets::paper8_shape();
    const auto basis = afc::affine_subspace_basis(shape);
    const auto sw = afc::compute_stress_weights(g, shape);

    afc::StressWeights bad = sw;
    bad.w[0] += 0.1;
    bad.laplacian = afc::laplacian_from_weights(g, bad.w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bad.laplacian);
    bad.eigenvalues = es.eigenvalues();
    const auto bad_report = afc::validate_stress(g, shape, bad, basis);
    CHECK_FALSE(bad_report.pass);
    CHECK(bad_report.max_equilibrium_residual > 1e-3);
    CHECK_FALSE(bad_report.equilibrium_ok);

    afc::StressWeights zero;
    zero.w.assign(17, 0.0);
    zero.laplacian = Eigen::MatrixXd::Zero(8, 8);
    zero.eigenvalues = Eigen::VectorXd::Zero(8);
    const auto zero_report = afc::validate_stress(g, shape, zero, basis);
    CHECK_FALSE(zero_report.pass);
    CHECK_FALSE(zero_report.rank_ok);
    CHECK(zero_report.equilibrium_ok);
}

TEST_CASE("the certificate margins scale linearly with the weights") {
    const auto g = fixtures::paper8_graph();
    const auto shape = afc::presets::paper8_shape();
    const auto basis = afc::affine_subspace_basis(shape);
    const auto sw = afc::compute_stress_weights(g, shape);

    const double alpha = 7.5;
    afc::StressWeights scaled = sw;
    for (auto& wi : scaled.w) wi *= alpha;
    scaled.laplacian = afc::laplacian_from_weights(g, scaled.w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled.laplacian);
    scaled.eigenvalues = es.eigenvalues();

    const auto report = afc::validate_stress(g, shape, scaled, basis);
    CHECK(report.pass);
    CHECK(report.lambda_gap == Catch::Approx(alpha).margin(1e-9));
    for (int i = 0; i < 8; ++i) {
        CHECK(scaled.eigenvalues(i) ==
              Catch::Approx(alpha * sw.eigenvalues(i)).margin(1e-9));
    }
}
