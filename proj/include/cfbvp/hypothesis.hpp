#pragma once

// Sampled checks of the structural assumptions on f and the existence margin.
//
// Every inequality that quantifies over a continuum is tested on a finite
// lattice: a pass means no counterexample was found, never a proof.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/error.hpp"
#include "cfbvp/greens_kernel.hpp"
#include "cfbvp/grid_function.hpp"
#include "cfbvp/mesh.hpp"
#include "cfbvp/problem.hpp"

namespace cfbvp {

/// One sampled check. `witness` names the worst (or first failing) sample.
struct CheckItem {
    explicit CheckItem(std::string n = {}) : name(std::move(n)) {}

    std::string name;
    bool passed = true;
    std::size_t samples = 0;
    std::string witness;
};

struct A1Report {
    bool passed = true;
    std::size_t density = 0;
    std::vector<CheckItem> items;
};

/// Relative change threshold between successive mesh doublings.
inline constexpr double finiteness_rel_tol = 1e-8;
inline constexpr std::size_t finiteness_levels = 4;
inline constexpr double inequality_rel_tol = 1e-12;
inline constexpr std::size_t kernel_sup_density = 401;

struct RefinedIntegral {
    /// Values on N, 2N, 4N, 8N cells; the last one is reported.
    std::vector<double> history;
    bool finite = false;
    std::string diagnostic;
    double value() const { return history.empty() ? std::numeric_limits<double>::quiet_NaN() : history.back(); }
};

struct HypothesisReport {
    double mu = 0.0;
    double R = 0.0;
    SymmetricGridFunction sigma;
    double sigma0 = 0.0;
    RefinedIntegral I_q;
    RefinedIntegral I_qu;
    double c_mu = 1.0;
    bool strict_paper_bound = false;
    double u_R = 0.0;
    double v_R = 0.0;
    /// c_mu * (1 + v(R)/u(R)) * I_qu.
    double denominator = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();
    /// R - denominator when ratio > 1, NaN otherwise.
    double eps_max = std::numeric_limits<double>::quiet_NaN();
    std::vector<CheckItem> items;
    bool passed = false;
};

namespace detail {

/// Symmetric interior lattice of n points in (-1,1); contains 0 for odd n.
inline std::vector<double> t_lattice(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = -1.0 + 2.0 * static_cast<double>(i + 1) / static_cast<double>(n + 1);
    if (n % 2 == 1) t[n / 2] = 0.0;
    return t;
}

/// n log-spaced points from lo to hi.
inline std::vector<double> log_lattice(double lo, double hi, std::size_t n) {
    std::vector<double> x(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    x.front() = lo;
    x.back() = hi;
    return x;
}

inline void fail(CheckItem& item, std::string witness) {
    if (item.passed) item.witness = std::move(witness);
    item.passed = false;
}

inline std::string eval_failure(const char* what, double a, double b, const Error& e) {
    return fmt::format("{} not evaluable at ({:.17g}, {:.17g}): {}", what, a, b, e.what());
}

}  // namespace detail

/// sigma_R(t) = int_0^1 G(t,tau) psi(tau) dtau at the given targets in [0,1].
inline std::vector<double> sigma_R_at(const ProblemSpec& spec, std::span<const double> targets, const Mesh& mesh) {
    return green_integral_many(spec.order(), [&](double s) { return spec.eval_psi(s); }, targets, mesh);
}

/// sigma_R on the breakpoints of a mesh over [0,1], read at |t| off the grid.
inline SymmetricGridFunction sigma_R(const ProblemSpec& spec, const Mesh& mesh) {
    const auto bp = mesh.breakpoints();
    auto v = sigma_R_at(spec, bp, mesh);
    return {std::vector<double>(bp.begin(), bp.end()), std::move(v)};
}

/// Lattice falsification of the structural assumptions on f, q, u, v:
/// f(0,x) = 0, f even in t, |f| <= q(|t|)(u + v), u decreasing, v increasing.
inline A1Report check_A1(const ProblemSpec& spec, std::size_t density) {
    if (density < 3) throw InvalidArgument("check_A1: density must be at least 3");
    A1Report rep;
    rep.density = density;
    const auto ts = detail::t_lattice(density | 1);
    const auto xs = detail::log_lattice(1e-6, 1e6, density);

    CheckItem zero{"f(0,x) = 0"}, even{"f(t,x) = f(-t,x)"}, major{"|f(t,x)| <= q(|t|)(u(x)+v(x))"};
    CheckItem udec{"u decreasing"}, vinc{"v increasing"};

    for (double x : xs) {
        ++zero.samples;
        try {
            const double f0 = spec.eval_f(0.0, x);
            if (f0 != 0.0) detail::fail(zero, fmt::format("f(0, {:.17g}) = {:.17g}", x, f0));
        } catch (const Error& e) {
            detail::fail(zero, detail::eval_failure("f", 0.0, x, e));
        }
    }

    for (double t : ts) {
        for (double x : xs) {
            if (t > 0.0) {
                ++even.samples;
                try {
                    const double a = spec.eval_f(t, x), b = spec.eval_f(-t, x);
                    if (std::abs(a - b) > inequality_rel_tol * std::max(std::abs(a), std::abs(b)))
                        detail::fail(even, fmt::format("f({0:.17g}, {1:.17g}) = {2:.17g} but f(-{0:.17g}, {1:.17g}) = {3:.17g}",
                                                       t, x, a, b));
                } catch (const Error& e) {
                    detail::fail(even, detail::eval_failure("f", t, x, e));
                }
            }
            ++major.samples;
            try {
                const double fv = spec.eval_f(t, x);
                const double bound = spec.eval_q(std::abs(t)) * (spec.eval_u(x) + spec.eval_v(x));
                if (!(std::abs(fv) <= bound * (1.0 + inequality_rel_tol)))
                    detail::fail(major, fmt::format("|f({:.17g}, {:.17g})| = {:.17g} exceeds {:.17g}", t, x,
                                                    std::abs(fv), bound));
            } catch (const Error& e) {
                detail::fail(major, detail::eval_failure("f, q, u or v", t, x, e));
            }
        }
    }

    auto monotone = [&](CheckItem& item, const Expr& e, bool decreasing) {
        double prev = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            ++item.samples;
            double cur;
            try {
                cur = e.eval(Bindings().set(Var::x, xs[i]));
            } catch (const Error& err) {
                detail::fail(item, fmt::format("not evaluable at x = {:.17g}: {}", xs[i], err.what()));
                return;
            }
            if (i > 0 && (decreasing ? cur > prev : cur < prev))
                detail::fail(item, fmt::format("value {:.17g} at x = {:.17g} after {:.17g} at x = {:.17g}", cur, xs[i],
                                               prev, xs[i - 1]));
            prev = cur;
        }
    };
    monotone(udec, spec.u, true);
    monotone(vinc, spec.v, false);

    rep.items = {zero, even, major, udec, vinc};
    for (const auto& it : rep.items) rep.passed = rep.passed && it.passed;
    return rep;
}

namespace detail {

template <class Level>
RefinedIntegral refine(Level&& at_level, const Numerics& num) {
    RefinedIntegral out;
    for (std::size_t k = 0; k < finiteness_levels; ++k) {
        const Mesh m = Mesh::build(0.0, 1.0, num.mesh_cells << k, num.mesh_gamma, SingularEnd::right,
                                   num.nodes_per_cell);
        try {
            out.history.push_back(at_level(m));
        } catch (const Error& e) {
            out.diagnostic = fmt::format("not finite on {} cells: {}", m.cells(), e.what());
            return out;
        }
    }
    out.finite = true;
    for (std::size_t k = 1; k < out.history.size(); ++k) {
        const double a = out.history[k - 1], b = out.history[k];
        const double change = std::abs(b - a) / std::max(std::abs(b), std::numeric_limits<double>::min());
        if (!(change < finiteness_rel_tol)) {
            out.finite = false;
            out.diagnostic = fmt::format("relative change {:.3e} between {} and {} cells exceeds {:.0e}", change,
                                         num.mesh_cells << (k - 1), num.mesh_cells << k, finiteness_rel_tol);
        }
    }
    return out;
}

}  // namespace detail

/// Existence margin: sigma_R, R >= sigma_R(0), psi >= 0, f >= psi on (-1,1) x (0,R],
/// finiteness of int q and int q u(sigma_R), and the ratio
/// R / (c_mu (1 + v(R)/u(R)) int q u(sigma_R)) with c_mu the sampled kernel supremum.
inline HypothesisReport check_A2(const ProblemSpec& spec, const Mesh& mesh) {
    const Numerics& num = spec.numerics;
    HypothesisReport rep;
    rep.mu = spec.mu;
    rep.R = spec.R;
    rep.strict_paper_bound = num.strict_paper_bound;
    rep.c_mu = num.strict_paper_bound ? 1.0 : green_sup(spec.order(), kernel_sup_density).value;

    CheckItem psi_nonneg{"psi_R >= 0"}, r_ge{"R >= sigma_R(0)"}, f_ge{"f(t,x) >= psi_R(|t|)"};
    CheckItem iq{"int q finite"}, iqu{"int q u(sigma_R) finite"}, ratio{"existence ratio > 1"};

    // psi on a lattice of [0,1) and on the quadrature nodes.
    std::vector<double> ss;
    for (std::size_t i = 0; i < num.check_density; ++i)
        ss.push_back(static_cast<double>(i) / static_cast<double>(num.check_density));
    for (double s : mesh.nodes()) ss.push_back(s);
    for (double s : ss) {
        ++psi_nonneg.samples;
        try {
            const double p = spec.eval_psi(s);
            if (!(p >= 0.0)) detail::fail(psi_nonneg, fmt::format("psi_R({:.17g}) = {:.17g}", s, p));
        } catch (const Error& e) {
            detail::fail(psi_nonneg, fmt::format("psi_R not evaluable at s = {:.17g}: {}", s, e.what()));
        }
    }

    try {
        rep.sigma = sigma_R(spec, mesh);
        rep.sigma0 = rep.sigma(0.0);
        ++r_ge.samples;
        if (!(spec.R >= rep.sigma0))
            detail::fail(r_ge, fmt::format("R = {:.17g} < sigma_R(0) = {:.17g}", spec.R, rep.sigma0));
    } catch (const Error& e) {
        detail::fail(r_ge, fmt::format("sigma_R not computable: {}", e.what()));
    }

    const auto ts = detail::t_lattice(num.check_density | 1);
    auto xs = detail::log_lattice(spec.R * 1e-6, spec.R, num.check_density);
    for (std::size_t j = 1; j <= num.check_density; ++j)
        xs.push_back(spec.R * static_cast<double>(j) / static_cast<double>(num.check_density));
    for (double t : ts) {
        for (double x : xs) {
            ++f_ge.samples;
            try {
                const double fv = spec.eval_f(t, x), p = spec.eval_psi(std::abs(t));
                if (!(fv >= p * (1.0 - inequality_rel_tol)))
                    detail::fail(f_ge, fmt::format("f({:.17g}, {:.17g}) = {:.17g} < psi_R = {:.17g}", t, x, fv, p));
            } catch (const Error& e) {
                detail::fail(f_ge, detail::eval_failure("f or psi_R", t, x, e));
            }
        }
    }

    rep.I_q = detail::refine([&](const Mesh& m) { return integrate([&](double s) { return spec.eval_q(s); }, m); }, num);
    iq.samples = rep.I_q.history.size();
    if (!rep.I_q.finite) detail::fail(iq, rep.I_q.diagnostic);

    rep.I_qu = detail::refine(
        [&](const Mesh& m) {
            const auto sig = sigma_R_at(spec, m.nodes(), m);
            const auto x = m.nodes();
            const auto w = m.weights();
            double acc = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double v = spec.eval_q(x[k]) * spec.eval_u(sig[k]);
                if (!std::isfinite(v))
                    throw NumericalError(fmt::format("q u(sigma_R) is not finite at {:.17g}", x[k]));
                acc += w[k] * v;
            }
            return acc;
        },
        num);
    iqu.samples = rep.I_qu.history.size();
    if (!rep.I_qu.finite) detail::fail(iqu, rep.I_qu.diagnostic);

    try {
        rep.u_R = spec.eval_u(spec.R);
        rep.v_R = spec.eval_v(spec.R);
        if (rep.I_qu.finite) {
            rep.denominator = rep.c_mu * (1.0 + rep.v_R / rep.u_R) * rep.I_qu.value();
            rep.ratio = spec.R / rep.denominator;
        }
    } catch (const Error& e) {
        detail::fail(ratio, fmt::format("u or v not evaluable at R: {}", e.what()));
    }
    ratio.samples = 1;
    if (!(rep.ratio > 1.0) || !std::isfinite(rep.ratio))
        detail::fail(ratio, fmt::format("ratio = {:.17g}", rep.ratio));
    else
        rep.eps_max = spec.R - rep.denominator;

    rep.items = {psi_nonneg, r_ge, f_ge, iq, iqu, ratio};
    rep.passed = true;
    for (const auto& it : rep.items) rep.passed = rep.passed && it.passed;
    return rep;
}

/// Largest eps with (R - eps) / (c_mu (1 + v(R)/u(R)) int q u(sigma_R)) >= 1.
inline double epsilon_max(const HypothesisReport& rep) {
    if (!(rep.ratio > 1.0))
        throw HypothesisError(fmt::format("epsilon_max requires ratio > 1, got {:.17g}", rep.ratio));
    return rep.R - rep.denominator;
}

}  // namespace cfbvp
