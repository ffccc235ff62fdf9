#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cfbvp/fixed_point.hpp"

using cfbvp::GreenOperator;
using cfbvp::Mesh;
using cfbvp::ProblemSpec;
using cfbvp::SingularEnd;
using cfbvp::SymmetricGridFunction;

namespace {

ProblemSpec worked(double R = 16, const std::string& extra = "") {
    return cfbvp::parse_problem("mu = 1.5\nR = " + std::to_string(R) +
                                "\nf = abs(t) * (1 - t^2)^(-0.25) * x^(-0.25)\nq = s * (1 - s^2)^(-0.25)\n"
                                "u = x^(-0.25)\nv = x^(0.25)\npsi = s * (1 - s^2)^(-0.25) * R^(-0.25)\n"
                                "mesh.cells = 512\n" + extra);
}

ProblemSpec simple(const std::string& f) {
    return cfbvp::parse_problem("mu = 1.5\nR = 4\nf = " + f + "\nq = s\nu = 1/x\nv = x\npsi = 0\nmesh.cells = 64\n");
}

SymmetricGridFunction constant(const GreenOperator& op, double c) {
    return SymmetricGridFunction::sample(op.output_nodes(), [c](double) { return c; });
}

// Hypotheses and epsilon for the worked family, computed once.
struct Worked {
    ProblemSpec spec = worked();
    cfbvp::HypothesisReport a2 = cfbvp::check_A2(spec, spec.numerics.mesh());
    double eps = 0.5 * cfbvp::epsilon_max(a2);
    GreenOperator op{spec.order(), spec.numerics.mesh()};
};

const Worked& wf() {
    static const Worked w;
    return w;
}

}  // namespace

TEST(Clamp, Examples) {
    EXPECT_DOUBLE_EQ(cfbvp::clamp_m(-5.0, 4, 10.0), 0.25);
    EXPECT_DOUBLE_EQ(cfbvp::clamp_m(1.0, 4, 10.0), 1.25);
    EXPECT_DOUBLE_EQ(cfbvp::clamp_m(20.0, 4, 10.0), 10.0);
    EXPECT_DOUBLE_EQ(cfbvp::clamp_m(0.0, 2, 10.0), 0.5);
    EXPECT_THROW(cfbvp::clamp_m(1.0, 0, 10.0), cfbvp::InvalidArgument);
    EXPECT_THROW(cfbvp::clamp_m(1.0, 4, 0.0), cfbvp::InvalidArgument);
}

TEST(Clamp, RangeAndIdentityProperty) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xs(-50.0, 50.0), rs(0.5, 40.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = xs(rng), R = rs(rng);
        const std::size_t m = 1 + rng() % 100;
        const double inv = 1.0 / static_cast<double>(m);
        const double c = cfbvp::clamp_m(x, m, R);
        EXPECT_LE(c, R);
        if (inv <= R) {
            EXPECT_GE(c, inv);
        }
        if (x >= 0.0 && x + inv <= R) {
            EXPECT_EQ(c, x + inv);
        }
    }
}

TEST(RegularizedMap, ZeroNonlinearityGivesZero) {
    const auto spec = simple("0*t*x");
    const GreenOperator op(spec.order(), spec.numerics.mesh());
    const auto tx = cfbvp::apply_Tm(spec, constant(op, 1.7), 16, op, 1.0);
    for (double v : tx.values()) EXPECT_EQ(v, 0.0);
}

TEST(RegularizedMap, BelowClampReducesToLinearProblem) {
    const auto spec = simple("abs(t)*x");
    const Mesh mesh = spec.numerics.mesh();
    const GreenOperator op(spec.order(), mesh);
    const std::size_t m = 8;
    const auto tx = cfbvp::apply_Tm(spec, constant(op, -1.0), m, op, 1.0);
    const auto y = SymmetricGridFunction::sample(mesh.breakpoints(), [&](double t) { return spec.eval_f(t, 1.0 / m); });
    const auto lin = cfbvp::solve_linear_bvp(spec.order(), y, mesh);
    EXPECT_LT(cfbvp::sup_distance(tx, lin.x), 1e-12);
}

TEST(RegularizedMap, RequiresInverseMBelowEpsilon) {
    const auto spec = simple("abs(t)*x");
    const GreenOperator op(spec.order(), spec.numerics.mesh());
    EXPECT_THROW(cfbvp::apply_Tm(spec, constant(op, 1.0), 4, op, 0.25), cfbvp::InvalidArgument);
    EXPECT_NO_THROW(cfbvp::apply_Tm(spec, constant(op, 1.0), 5, op, 0.25));
}

TEST(RegularizedMap, MapsOrderIntervalIntoItself) {
    const auto& w = wf();
    const auto& sigma = w.a2.sigma;
    const double upper = w.spec.R - w.eps;
    std::vector<SymmetricGridFunction> probes{sigma, constant(w.op, upper)};
    probes.push_back(SymmetricGridFunction::sample(w.op.output_nodes(),
                                                   [&](double t) { return 0.5 * (sigma(t) + upper); }));
    for (const auto& x : probes) {
        const auto tx = cfbvp::apply_Tm(w.spec, x, 64, w.op, w.eps);
        for (std::size_t i = 0; i < tx.size(); ++i) {
            EXPECT_GE(tx.values()[i] - sigma.values()[i], -cfbvp::bound_tolerance);
            EXPECT_LE(tx.values()[i], upper);
        }
    }
}

TEST(FixedM, FixedPointIsPreserved) {
    const auto& w = wf();
    const auto r = cfbvp::solve_fixed_m(w.spec, 64, w.op, w.eps, w.a2.sigma);
    const auto tx = cfbvp::apply_Tm(w.spec, r.x, 64, w.op, w.eps);
    EXPECT_LT(cfbvp::sup_distance(tx, r.x), 10 * w.spec.numerics.inner_tol);
    const auto again = cfbvp::solve_fixed_m(w.spec, 64, w.op, w.eps, r.x);
    EXPECT_LE(again.iterations, 2u);
}

TEST(FixedM, DampingDoesNotChangeTheLimit) {
    const auto& w = wf();
    auto damped = w.spec;
    damped.numerics.omega = 0.5;
    const auto a = cfbvp::solve_fixed_m(w.spec, 64, w.op, w.eps, w.a2.sigma);
    const auto b = cfbvp::solve_fixed_m(damped, 64, w.op, w.eps, w.a2.sigma);
    EXPECT_GT(b.iterations, a.iterations);
    EXPECT_LE(cfbvp::sup_distance(a.x, b.x), 2 * w.spec.numerics.inner_tol);
}

TEST(FixedM, BudgetExhaustionThrows) {
    const auto& w = wf();
    auto tight = w.spec;
    tight.numerics.max_iter = 2;
    EXPECT_THROW(cfbvp::solve_fixed_m(tight, 64, w.op, w.eps, w.a2.sigma), cfbvp::SolverError);
}

TEST(FixedM, WorkedFamilyStaysInsideBounds) {
    const auto& w = wf();
    const auto r = cfbvp::solve_fixed_m(w.spec, 64, w.op, w.eps, w.a2.sigma);
    const double upper = w.spec.R - w.eps;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        EXPECT_GE(r.x.values()[i] - w.a2.sigma.values()[i], -cfbvp::bound_tolerance);
        EXPECT_GE(upper - r.x.values()[i], -cfbvp::bound_tolerance);
    }
}

TEST(Residual, LinearRightHandSideIsExact) {
    const auto spec = simple("abs(t)*(1 + 0*x)");
    const GreenOperator op(spec.order(), spec.numerics.mesh());
    const auto x = cfbvp::apply_Tm(spec, constant(op, 1.0), 16, op, 1.0);
    EXPECT_LT(cfbvp::residual_nonlinear(spec, x, op).sup, 1e-13);
}

TEST(Residual, PerturbationIncreasesResidual) {
    const auto& w = wf();
    const auto r = cfbvp::solve_fixed_m(w.spec, 128, w.op, w.eps, w.a2.sigma);
    const double base = cfbvp::residual_nonlinear(w.spec, r.x, w.op).sup;
    std::vector<double> shifted(r.x.values().begin(), r.x.values().end());
    for (double& v : shifted) v += 0.01;
    const SymmetricGridFunction xp(std::vector<double>(r.x.nodes().begin(), r.x.nodes().end()), shifted);
    EXPECT_GT(cfbvp::residual_nonlinear(w.spec, xp, w.op).sup, base);
}

TEST(Solve, WorkedFamilyConverges) {
    const auto rep = cfbvp::solve(worked());
    ASSERT_EQ(rep.status, cfbvp::SolveStatus::converged) << rep.diagnostic;
    EXPECT_EQ(rep.stages.size(), 4u);
    EXPECT_TRUE(rep.deviations_monotone);
    EXPECT_LT(rep.inter_m_deviation.back(), 1e-2);
    EXPECT_GE(rep.lb_margin, -cfbvp::bound_tolerance);
    EXPECT_GE(rep.ub_margin, -cfbvp::bound_tolerance);
    EXPECT_GT(rep.min_interior, 0.0);
    EXPECT_EQ(rep.x(1.0), 0.0);
    EXPECT_EQ(rep.x(-0.3), rep.x(0.3));
    EXPECT_LT(rep.regularized_residual, 1e-10);
}

TEST(Solve, RefusesFailingHypotheses) {
    EXPECT_THROW(cfbvp::solve(worked(1)), cfbvp::HypothesisError);
    const auto odd = cfbvp::parse_problem("mu = 1.5\nR = 16\nf = t*x\nq = s\nu = 1/x\nv = x\npsi = 0\n");
    EXPECT_THROW(cfbvp::solve(odd), cfbvp::HypothesisError);
}

TEST(Solve, InnerFailureIsReported) {
    const auto rep = cfbvp::solve(worked(16, "solver.max_iter = 2\n"));
    EXPECT_EQ(rep.status, cfbvp::SolveStatus::inner_failure);
    EXPECT_FALSE(rep.diagnostic.empty());
}
