#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfbvp/cf_calculus.hpp"

using cfbvp::FracOrder;
using cfbvp::Mesh;

namespace {

// Closed form of the n = 2 operator on x(t) = t^2 (x'' = 2):
// (1/(2-mu)) * 2 * (1 - e^{-lambda|t|}) / lambda.
double square_oracle(double mu, double t) {
    const double lambda = (mu - 1.0) / (2.0 - mu);
    return 2.0 * (1.0 - std::exp(-lambda * std::abs(t))) / ((2.0 - mu) * lambda);
}

}  // namespace

TEST(KernelRate, Examples) {
    EXPECT_EQ(cfbvp::rate_of(FracOrder(1.5)).value(), 1.0);
    EXPECT_NEAR(cfbvp::rate_of(FracOrder(4.0 / 3.0)).value(), 0.5, 1e-15);
    EXPECT_THROW(FracOrder(2.0), cfbvp::InvalidArgument);
    EXPECT_THROW(FracOrder(1.0), cfbvp::InvalidArgument);
    EXPECT_THROW(FracOrder(NAN), cfbvp::InvalidArgument);
}

TEST(KernelRate, IncreasingInOrder) {
    double prev = 0.0;
    for (double mu = 1.01; mu < 2.0; mu += 0.01) {
        const double l = cfbvp::rate_of(FracOrder(mu)).value();
        EXPECT_GT(l, prev);
        prev = l;
    }
}

TEST(CfDerivative, SquareMatchesClosedForm) {
    // mu = 1.5, t = 1 reduces to 4 (1 - e^{-1}).
    EXPECT_NEAR(square_oracle(1.5, 1.0), 4.0 * (1.0 - std::exp(-1.0)), 1e-15);
    auto two = [](double) { return 2.0; };
    for (double mu : {1.2, 1.5, 1.8}) {
        for (double t : {0.25, 0.5, 1.0}) {
            const double exact = square_oracle(mu, t);
            EXPECT_NEAR(cfbvp::cf_left(two, FracOrder(mu), t, 256), exact, 1e-10 * exact);
            EXPECT_NEAR(cfbvp::cf_right(two, FracOrder(mu), -t, 256), exact, 1e-10 * exact);
        }
    }
}

TEST(CfDerivative, AffineFunctionsVanish) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto zero = [](double) { return 0.0; };
    for (int i = 0; i < 20; ++i) {
        const double t = u(rng);
        EXPECT_LE(std::abs(cfbvp::cf_left(zero, FracOrder(1.5), t)), 1e-12);
        EXPECT_LE(std::abs(cfbvp::cf_right(zero, FracOrder(1.5), -t)), 1e-12);
    }
}

TEST(CfDerivative, ReflectionIdentity) {
    const FracOrder mu(1.5);
    const double t = -0.7;
    auto sq = [](double) { return 2.0; };
    EXPECT_NEAR(cfbvp::cf_right(sq, mu, t), cfbvp::cf_left([&](double tau) { return sq(-tau); }, mu, -t), 1e-14);
    // x(t) = t^3 + e^t is neither even nor odd.
    auto x2 = [](double tau) { return 6.0 * tau + std::exp(tau); };
    EXPECT_NEAR(cfbvp::cf_right(x2, mu, t), cfbvp::cf_left([&](double tau) { return x2(-tau); }, mu, -t), 1e-13);
    EXPECT_NEAR(cfbvp::cf_right(sq, mu, -1.0), cfbvp::cf_left(sq, mu, 1.0), 1e-14);
}

TEST(CfDerivative, Linearity) {
    const FracOrder mu(1.3);
    auto f = [](double tau) { return std::cos(tau); };
    auto g = [](double tau) { return tau * tau; };
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 10; ++i) {
        const double a = u(rng), b = u(rng);
        const double lhs = cfbvp::cf_left([&](double tau) { return a * f(tau) + b * g(tau); }, mu, 0.8);
        const double rhs = a * cfbvp::cf_left(f, mu, 0.8) + b * cfbvp::cf_left(g, mu, 0.8);
        EXPECT_NEAR(lhs, rhs, 1e-13);
    }
}

TEST(CfDerivative, FirstOrderAgainstClosedForm) {
    // n = 1, mu in (0,1), x(t) = t: k = mu/(1-mu), left value (1 - e^{-kt}) / mu.
    const double mu = 0.4;
    const double k = mu / (1.0 - mu);
    auto one = [](double) { return 1.0; };
    for (double t : {0.3, 1.0}) {
        const double exact = (1.0 - std::exp(-k * t)) / mu;
        EXPECT_NEAR(cfbvp::cf_left_general(one, mu, 1, t, Mesh::build(0.0, t, 16)), exact, 1e-13);
        EXPECT_NEAR(cfbvp::cf_right_general(one, mu, 1, -t, Mesh::build(-t, 0.0, 16)), -exact, 1e-13);
    }
    EXPECT_THROW(cfbvp::cf_kernel_rate(1.5, 1), cfbvp::InvalidArgument);
}

TEST(CfDerivative, Errors) {
    auto one = [](double) { return 1.0; };
    EXPECT_THROW(cfbvp::cf_left(one, FracOrder(1.5), -0.1, Mesh::build(0.0, 1.0, 4)), cfbvp::InvalidArgument);
    EXPECT_THROW(cfbvp::cf_right(one, FracOrder(1.5), 0.1, Mesh::build(0.0, 1.0, 4)), cfbvp::InvalidArgument);
    EXPECT_THROW(cfbvp::cf_left(one, FracOrder(1.5), 0.5, Mesh::build(0.0, 1.0, 4)), cfbvp::InvalidArgument);
    EXPECT_THROW(cfbvp::cf_left([](double) { return INFINITY; }, FracOrder(1.5), 0.5), cfbvp::NumericalError);
    EXPECT_EQ(cfbvp::cf_left(one, FracOrder(1.5), 0.0), 0.0);
}
