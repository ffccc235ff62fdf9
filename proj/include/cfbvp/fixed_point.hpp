#pragma once

// Regularized map
//
//   T_m x(t) = int_0^1 G(|t|,tau) f(tau, min(max(x(tau) + 1/m, 1/m), R)) dtau,
//
// damped Picard iteration at fixed m, and the sweep over an increasing m
// schedule whose successive iterates are compared in the sup norm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/error.hpp"
#include "cfbvp/greens_kernel.hpp"
#include "cfbvp/grid_function.hpp"
#include "cfbvp/hypothesis.hpp"
#include "cfbvp/linear_ide.hpp"
#include "cfbvp/problem.hpp"

namespace cfbvp {

/// Slack allowed on the a-priori bounds.
inline constexpr double bound_tolerance = 1e-9;
/// Consecutive step increases that count as divergence.
inline constexpr std::size_t divergence_window = 10;

inline double clamp_m(double x, std::size_t m, double R) {
    if (m == 0) throw InvalidArgument("clamp_m: m must be positive");
    if (!(R > 0.0)) throw InvalidArgument("clamp_m: R must be positive");
    const double inv = 1.0 / static_cast<double>(m);
    return std::min(std::max(x + inv, inv), R);
}

namespace detail {

inline double eval_f_at(const ProblemSpec& spec, double t, double x) {
    try {
        return spec.eval_f(t, x);
    } catch (const EvalError& e) {
        throw EvalError(fmt::format("f not evaluable at node t = {:.17g}, x = {:.17g}: {}", t, x, e.what()),
                        e.subexpression());
    }
}

}  // namespace detail

/// One application of T_m; the result lives on the operator's output nodes.
/// Requires 1/m < epsilon.
inline SymmetricGridFunction apply_Tm(const ProblemSpec& spec, const SymmetricGridFunction& x, std::size_t m,
                                      const GreenOperator& op, double epsilon) {
    if (m == 0 || !(1.0 / static_cast<double>(m) < epsilon))
        throw InvalidArgument(fmt::format("apply_Tm: 1/m = {} is not below eps = {}", m ? 1.0 / m : INFINITY, epsilon));
    const auto y = op.sample([&](double tau) { return detail::eval_f_at(spec, tau, clamp_m(x(tau), m, spec.R)); });
    return op.apply_to(y);
}

struct FixedMResult {
    SymmetricGridFunction x;
    std::size_t iterations = 0;
    double final_step = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> steps;
};

/// Damped Picard x <- (1-omega) x + omega T_m x started from x0, until the sup-norm
/// step falls below the inner tolerance. Throws SolverError on divergence or when
/// the iteration budget runs out.
inline FixedMResult solve_fixed_m(const ProblemSpec& spec, std::size_t m, const GreenOperator& op, double epsilon,
                                  const SymmetricGridFunction& x0) {
    const Numerics& num = spec.numerics;
    FixedMResult out;
    out.x = x0;
    std::size_t growth = 0;
    for (std::size_t it = 1; it <= num.max_iter; ++it) {
        const auto tx = apply_Tm(spec, out.x, m, op, epsilon);
        const auto xs = out.x.values();
        const auto ts = tx.values();
        std::vector<double> next(xs.size());
        double step = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            next[i] = num.omega == 1.0 ? ts[i] : (1.0 - num.omega) * xs[i] + num.omega * ts[i];
            step = std::max(step, std::abs(next[i] - xs[i]));
        }
        if (!std::isfinite(step)) throw SolverError(fmt::format("m = {}: iterate became non-finite at iteration {}", m, it));
        growth = (!out.steps.empty() && step > out.steps.back()) ? growth + 1 : 0;
        out.steps.push_back(step);
        out.x = SymmetricGridFunction(std::vector<double>(tx.nodes().begin(), tx.nodes().end()), std::move(next));
        out.iterations = it;
        out.final_step = step;
        if (step < num.inner_tol) return out;
        if (growth >= divergence_window)
            throw SolverError(fmt::format("m = {}: step grew for {} consecutive iterations (last {:.3e})", m,
                                          divergence_window, step));
    }
    throw SolverError(fmt::format("m = {}: no convergence in {} iterations (last step {:.3e}, tolerance {:.1e})", m,
                                  num.max_iter, out.final_step, num.inner_tol));
}

struct NonlinearResidual {
    /// x - int G f(., x) at the grid nodes.
    SymmetricGridFunction pointwise;
    double sup = std::numeric_limits<double>::quiet_NaN();
};

/// Integral-form residual |x - int G(t,tau) f(tau, x(tau)) dtau| on the operator's nodes.
/// x must be positive wherever f is sampled.
inline NonlinearResidual residual_nonlinear(const ProblemSpec& spec, const SymmetricGridFunction& x,
                                            const GreenOperator& op) {
    const auto y = op.sample([&](double tau) { return detail::eval_f_at(spec, tau, x(tau)); });
    const auto gx = op.apply(y);
    const auto nodes = op.output_nodes();
    std::vector<double> r(gx.size());
    NonlinearResidual out;
    out.sup = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = x(nodes[i]) - gx[i];
        out.sup = std::max(out.sup, std::abs(r[i]));
    }
    out.pointwise = SymmetricGridFunction(std::vector<double>(nodes.begin(), nodes.end()), std::move(r));
    return out;
}

/// Differential-form residual of the nonlinear equation on the grid nodes in
/// [0, t_max]. Diagnostic only: it differentiates interpolated data, and near
/// t = 1 the solution's second derivative is unbounded.
inline double residual_nonlinear_differential(const ProblemSpec& spec, const SymmetricGridFunction& x,
                                              double t_max = 0.9) {
    const auto nodes = x.nodes();
    std::size_t n = 0;
    while (n < nodes.size() && nodes[n] <= t_max && nodes[n] < 1.0) ++n;
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = detail::eval_f_at(spec, nodes[i], x.values()[i]);
    const auto r = residual_linear_half(spec.order(), nodes.first(n), x.values().first(n), ys);
    double sup = 0.0;
    for (double v : r) sup = std::max(sup, std::abs(v));
    return sup;
}

enum class SolveStatus { converged, not_stabilized, bounds_violated, inner_failure };

inline std::string_view status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::not_stabilized: return "not-stabilized";
        case SolveStatus::bounds_violated: return "bounds-violated";
        case SolveStatus::inner_failure: return "inner-failure";
    }
    return "?";
}

struct MStage {
    std::size_t m = 0;
    std::size_t iterations = 0;
    double final_step = 0.0;
    /// min(x - sigma_R) and min(R - eps - x) over the grid.
    double lb_margin = 0.0;
    double ub_margin = 0.0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::inner_failure;
    std::string diagnostic;
    A1Report a1;
    HypothesisReport hypothesis;
    double epsilon = 0.0;
    SymmetricGridFunction x;
    std::vector<MStage> stages;
    /// sup |x_{m_{k+1}} - x_{m_k}|.
    std::vector<double> inter_m_deviation;
    bool deviations_monotone = false;
    double lb_margin = std::numeric_limits<double>::quiet_NaN();
    double ub_margin = std::numeric_limits<double>::quiet_NaN();
    double min_interior = std::numeric_limits<double>::quiet_NaN();
    NonlinearResidual residual;
    /// Residual against T_m at the last m.
    double regularized_residual = std::numeric_limits<double>::quiet_NaN();
    /// Differential form on [0, 0.9].
    double differential_residual = std::numeric_limits<double>::quiet_NaN();
    std::string differential_note;
};

/// The m sweep from x0 = sigma_R at each m, given hypothesis reports computed
/// for this spec on num.mesh(). Throws HypothesisError when either report failed
/// and ConfigError when the m schedule violates 1/m < eps. Inner failures are
/// reported through the status.
inline SolveReport solve(const ProblemSpec& spec, A1Report a1, HypothesisReport hypothesis) {
    const Numerics& num = spec.numerics;
    SolveReport rep;
    rep.a1 = std::move(a1);
    rep.hypothesis = std::move(hypothesis);
    if (!rep.a1.passed) throw HypothesisError("structural assumptions on f failed; run check for witnesses");
    if (!rep.hypothesis.passed) throw HypothesisError("existence condition failed; run check for details");
    const Mesh mesh = num.mesh();

    rep.epsilon = num.epsilon_fraction * epsilon_max(rep.hypothesis);
    for (std::size_t m : num.m_schedule)
        if (!(1.0 / static_cast<double>(m) < rep.epsilon))
            throw ConfigError(fmt::format("m = {} violates 1/m < eps = {:.17g}", m, rep.epsilon));

    const GreenOperator op(spec.order(), mesh);
    const SymmetricGridFunction& sigma = rep.hypothesis.sigma;
    const double upper = spec.R - rep.epsilon;

    SymmetricGridFunction previous;
    for (std::size_t m : num.m_schedule) {
        FixedMResult r;
        try {
            r = solve_fixed_m(spec, m, op, rep.epsilon, sigma);
        } catch (const SolverError& e) {
            rep.status = SolveStatus::inner_failure;
            rep.diagnostic = e.what();
            return rep;
        }
        MStage st;
        st.m = m;
        st.iterations = r.iterations;
        st.final_step = r.final_step;
        st.lb_margin = st.ub_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            st.lb_margin = std::min(st.lb_margin, r.x.values()[i] - sigma.values()[i]);
            st.ub_margin = std::min(st.ub_margin, upper - r.x.values()[i]);
        }
        rep.stages.push_back(st);
        if (previous.size() > 0) rep.inter_m_deviation.push_back(sup_distance(r.x, previous));
        previous = r.x;
        rep.x = std::move(r.x);
    }

    rep.deviations_monotone = true;
    for (std::size_t k = 1; k < rep.inter_m_deviation.size(); ++k)
        rep.deviations_monotone = rep.deviations_monotone && rep.inter_m_deviation[k] < rep.inter_m_deviation[k - 1];
    rep.lb_margin = rep.stages.back().lb_margin;
    rep.ub_margin = rep.stages.back().ub_margin;
    rep.min_interior = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < rep.x.size(); ++i) rep.min_interior = std::min(rep.min_interior, rep.x.values()[i]);

    const auto tx = apply_Tm(spec, rep.x, num.m_schedule.back(), op, rep.epsilon);
    rep.regularized_residual = sup_distance(tx, rep.x);
    try {
        rep.residual = residual_nonlinear(spec, rep.x, op);
    } catch (const Error& e) {
        rep.status = SolveStatus::inner_failure;
        rep.diagnostic = fmt::format("residual not computable: {}", e.what());
        return rep;
    }
    try {
        rep.differential_residual = residual_nonlinear_differential(spec, rep.x);
    } catch (const Error& e) {
        rep.differential_note = e.what();
    }

    const bool stabilized = rep.inter_m_deviation.empty() || rep.inter_m_deviation.back() < num.inter_m_tol;
    bool bounds_ok = true;
    for (const auto& st : rep.stages)
        bounds_ok = bounds_ok && st.lb_margin >= -bound_tolerance && st.ub_margin >= -bound_tolerance;
    if (!stabilized) {
        rep.status = SolveStatus::not_stabilized;
        rep.diagnostic = fmt::format("last inter-m deviation {:.3e} is not below {:.1e}",
                                     rep.inter_m_deviation.back(), num.inter_m_tol);
    } else if (!bounds_ok) {
        rep.status = SolveStatus::bounds_violated;
        rep.diagnostic = fmt::format("bound margins lb {:.3e}, ub {:.3e}", rep.lb_margin, rep.ub_margin);
    } else {
        rep.status = SolveStatus::converged;
    }
    return rep;
}

/// Full pipeline: both hypothesis checks, then the m sweep.
inline SolveReport solve(const ProblemSpec& spec) {
    auto a1 = check_A1(spec, spec.numerics.check_density);
    if (!a1.passed) throw HypothesisError("structural assumptions on f failed; run check for witnesses");
    auto a2 = check_A2(spec, spec.numerics.mesh());
    return solve(spec, std::move(a1), std::move(a2));
}

}  // namespace cfbvp
