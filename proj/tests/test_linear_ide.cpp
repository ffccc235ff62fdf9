#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cfbvp/linear_ide.hpp"

using cfbvp::FracOrder;
using cfbvp::GeneralSolutionCoeffs;
using cfbvp::Mesh;
using cfbvp::SingularEnd;
using cfbvp::SymmetricGridFunction;

namespace {

std::vector<double> uniform_nodes(std::size_t cells) {
    std::vector<double> v(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) v[i] = static_cast<double>(i) / static_cast<double>(cells);
    v.back() = 1.0;
    return v;
}

double lambda_of(double mu) { return (mu - 1.0) / (2.0 - mu); }

}  // namespace

TEST(GeneralSolution, HomogeneousIsHyperbolic) {
    const FracOrder mu(1.5);
    auto zero = [](double) { return 0.0; };
    for (double t : {0.0, 0.3, 1.0}) {
        EXPECT_NEAR(cfbvp::general_solution_right_half(mu, {1.0, 0.0}, zero, t, Mesh::build(0.0, std::max(t, 0.1), 8)),
                    std::cosh(t), 1e-15);
        EXPECT_NEAR(cfbvp::general_solution_left_half(mu, {1.0, 0.0}, zero, -t,
                                                       Mesh::build(std::min(-t, -0.1), 0.0, 8)),
                    std::cosh(t), 1e-15);
    }
    EXPECT_EQ(cfbvp::general_solution_right_half(mu, {0.0, 1.0}, zero, 0.0, Mesh::build(0.0, 1.0, 1)), 0.0);
}

TEST(GeneralSolution, SquareForcing) {
    // x(1) = -int_0^1 e^{1-tau} tau^2 dtau = -(2e - 5) = 5 - 2e.
    const FracOrder mu(1.5);
    auto sq = [](double t) { return t * t; };
    EXPECT_NEAR(cfbvp::general_solution_right_half(mu, {}, sq, 1.0, Mesh::build(0.0, 1.0, 32)),
                5.0 - 2.0 * std::exp(1.0), 1e-14);
    EXPECT_EQ(cfbvp::general_solution_left_half(mu, {}, sq, 0.0, Mesh::build(-1.0, 0.0, 1)), 0.0);
}

TEST(GeneralSolution, MirrorOfEvenForcing) {
    const FracOrder mu(1.7);
    auto y = [](double t) { return t * t + std::cos(t) - 1.0; };
    const GeneralSolutionCoeffs b{0.4, -1.3};
    for (double t : {0.2, 0.6, 1.0}) {
        const double r = cfbvp::general_solution_right_half(mu, b, y, t, Mesh::build(0.0, t, 32));
        const double l = cfbvp::general_solution_left_half(mu, {b.c1, -b.c2}, y, -t, Mesh::build(-t, 0.0, 32));
        EXPECT_NEAR(r, l, 1e-12);
    }
    EXPECT_THROW(cfbvp::general_solution_right_half(mu, b, y, 0.5, Mesh::build(0.0, 1.0, 4)), cfbvp::InvalidArgument);
    EXPECT_THROW(cfbvp::general_solution_left_half(mu, b, y, 0.5, Mesh::build(0.0, 1.0, 4)), cfbvp::InvalidArgument);
}

TEST(LinearBvp, ZeroAndSquare) {
    const FracOrder mu(1.5);
    const Mesh mesh = Mesh::build(0.0, 1.0, 256, 3.0, SingularEnd::right);
    const auto zero = SymmetricGridFunction::sample(mesh.breakpoints(), [](double) { return 0.0; });
    const auto z = cfbvp::solve_linear_bvp(mu, zero, mesh);
    for (double v : z.x.values()) EXPECT_EQ(v, 0.0);

    const auto y = SymmetricGridFunction::sample(mesh.breakpoints(), [](double t) { return t * t; });
    const auto s = cfbvp::solve_linear_bvp(mu, y, mesh);
    EXPECT_LE(std::abs(s.x(1.0)), 1e-12);
    EXPECT_LE(std::abs(s.x(-1.0)), 1e-12);
    EXPECT_NEAR(s.x(0.0), (2.0 * std::exp(1.0) - 5.0) / std::cosh(1.0), 1e-12);
    EXPECT_LE(s.closed_form_discrepancy, 1e-12);
}

TEST(LinearBvp, GreenAndClosedFormAgreeForSmoothData) {
    for (double mu : {1.2, 1.5, 1.8}) {
        const Mesh mesh = Mesh::build(0.0, 1.0, 128, 3.0, SingularEnd::right);
        const auto y = SymmetricGridFunction::sample(
            mesh.breakpoints(), [](double t) { return 0.3 * t * t - std::sin(t * t) + 2.0 * (1.0 - std::cos(t)); });
        EXPECT_LE(cfbvp::solve_linear_bvp(FracOrder(mu), y, mesh).closed_form_discrepancy, 1e-12) << mu;
    }
}

TEST(LinearBvp, OriginSlopeForConstantForcing) {
    // y = 1 violates y(0) = 0; the Green's representation then has x'(0+) = -1.
    const Mesh mesh = Mesh::build(0.0, 1.0, 256, 3.0, SingularEnd::right);
    for (double mu : {1.2, 1.5, 1.8})
        EXPECT_NEAR(cfbvp::origin_slope(FracOrder(mu), [](double) { return 1.0; }, mesh), -1.0, 1e-3) << mu;
}

TEST(LinearResidual, HomogeneousSolutions) {
    for (double mu : {1.2, 1.5}) {
        const double l = lambda_of(mu);
        const auto nodes = uniform_nodes(256);
        const auto x = SymmetricGridFunction::sample(nodes, [&](double t) { return std::cosh(l * t); });
        const auto y = SymmetricGridFunction::sample(nodes, [](double) { return 0.0; });
        EXPECT_LE(cfbvp::residual_linear(FracOrder(mu), x, y).sup, 1e-8) << mu;

        // sinh on one half, through the half-line routine.
        std::vector<double> sx, zeros(nodes.size(), 0.0);
        for (double t : nodes) sx.push_back(std::sinh(l * t));
        double worst = 0.0;
        for (double r : cfbvp::residual_linear_half(FracOrder(mu), nodes, sx, zeros)) worst = std::max(worst, std::abs(r));
        EXPECT_LE(worst, 1e-8) << mu;

        std::vector<double> left_nodes;
        for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) left_nodes.push_back(-*it);
        std::vector<double> lx;
        for (double t : left_nodes) lx.push_back(std::sinh(l * t));
        worst = 0.0;
        for (double r : cfbvp::residual_linear_half(FracOrder(mu), left_nodes, lx, zeros))
            worst = std::max(worst, std::abs(r));
        EXPECT_LE(worst, 1e-8) << mu;
    }
}

TEST(LinearResidual, LargerRateNeedsFinerGrid) {
    const double mu = 1.8, l = lambda_of(mu);
    const auto nodes = uniform_nodes(512);
    const auto x = SymmetricGridFunction::sample(nodes, [&](double t) { return std::cosh(l * t); });
    const auto y = SymmetricGridFunction::sample(nodes, [](double) { return 0.0; });
    EXPECT_LE(cfbvp::residual_linear(FracOrder(mu), x, y).sup, 1e-8);
}

TEST(LinearResidual, NonSolutionHasVisibleResidual) {
    const auto nodes = uniform_nodes(64);
    const auto x = SymmetricGridFunction::sample(nodes, [](double t) { return t; });
    const auto y = SymmetricGridFunction::sample(nodes, [](double) { return 0.0; });
    EXPECT_GT(cfbvp::residual_linear(FracOrder(1.5), x, y).sup, 1e-3);
}

TEST(LinearResidual, ConvergesUnderRefinement) {
    const FracOrder mu(1.5);
    double previous = INFINITY;
    for (std::size_t cells : {16u, 32u, 64u, 128u}) {
        const auto nodes = uniform_nodes(cells);
        const Mesh mesh = Mesh::from_breakpoints(nodes);
        const auto y = SymmetricGridFunction::sample(nodes, [](double t) { return t * t; });
        const auto sol = cfbvp::solve_linear_bvp(mu, y, mesh);
        const double sup = cfbvp::residual_linear(mu, sol.x, y).sup;
        EXPECT_LT(sup, previous) << cells;
        previous = sup;
    }
    EXPECT_LE(previous, 1e-6);
}

TEST(LinearResidual, CoarseGridRejected) {
    const auto nodes = uniform_nodes(4);
    const auto x = SymmetricGridFunction::sample(nodes, [](double t) { return t * t; });
    EXPECT_THROW(cfbvp::residual_linear(FracOrder(1.5), x, x), cfbvp::InvalidArgument);
}
