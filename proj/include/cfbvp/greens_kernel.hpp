#pragma once

// Four-branch Green's function of the Caputo-Fabrizio boundary problem
//
//   (2-mu) D^mu x + y = lambda^2 * (memory integral of x),  x(+-1) = x'(0+-) = 0.
//
// With C(t) = cosh(lambda t)/cosh(lambda), on the right square 0 <= t,tau <= 1
//
//   lower (tau <= t):  C(t) exp(lambda(1-tau)) - exp(lambda(t-tau))
//   upper (t <= tau):  C(t) exp(lambda(1-tau))
//
// and on the left square G(t,tau) = G(-t,-tau). Pairs with t and tau of
// opposite sign are not part of the kernel and are rejected.
//
// Audit findings (checked by the test suite): the branches differ by exactly
// 1 across the diagonal, so G is not continuous there, and sup G equals
// 1 + tanh(lambda) > 1, attained on the upper side at t = tau = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/cf_calculus.hpp"
#include "cfbvp/error.hpp"
#include "cfbvp/grid_function.hpp"
#include "cfbvp/mesh.hpp"

namespace cfbvp {

enum class GreenBranch { left_lower, left_upper, right_lower, right_upper };

inline std::string_view branch_name(GreenBranch b) {
    switch (b) {
        case GreenBranch::left_lower: return "left-lower";
        case GreenBranch::left_upper: return "left-upper";
        case GreenBranch::right_lower: return "right-lower";
        case GreenBranch::right_upper: return "right-upper";
    }
    return "?";
}

/// Which branch supplies the value on the diagonal tau = t. `memory` is the
/// branch carrying the Volterra term exp(lambda(t-tau)) (right-lower, left-upper).
enum class DiagonalSide { memory, plain };

struct GreenPoint {
    double t = 0.0;
    double tau = 0.0;
    GreenBranch branch = GreenBranch::right_upper;
    double value = 0.0;
};

namespace detail {

inline void check_green_args(double t, double tau) {
    if (!(std::abs(t) <= 1.0) || !(std::abs(tau) <= 1.0))
        throw InvalidArgument(fmt::format("Green's function argument outside [-1,1]: ({}, {})", t, tau));
    if ((t < 0.0 && tau > 0.0) || (t > 0.0 && tau < 0.0))
        throw InvalidArgument(
            fmt::format("Green's function is not defined for mixed-sign arguments ({}, {})", t, tau));
}

/// Right-square branch formulas exactly as written. s, sigma in [0,1].
inline double green_upper(double lambda, double s, double sigma) {
    return std::cosh(lambda * s) / std::cosh(lambda) * std::exp(lambda * (1.0 - sigma));
}

inline double green_lower(double lambda, double s, double sigma) {
    return std::cosh(lambda * s) / std::cosh(lambda) * std::exp(lambda * (1.0 - sigma)) -
           std::exp(lambda * (s - sigma));
}

}  // namespace detail

/// Full evaluation with branch tag. Left-square points are mapped to the right
/// square first, so left values reproduce right values bit for bit.
inline GreenPoint green_point(FracOrder mu, double t, double tau,
                              DiagonalSide side = DiagonalSide::memory) {
    detail::check_green_args(t, tau);
    const double lambda = rate_of(mu).value();
    const bool left = t < 0.0 || tau < 0.0;
    const double s = std::abs(t);
    const double sigma = std::abs(tau);
    const bool lower = sigma < s || (sigma == s && side == DiagonalSide::memory);

    GreenPoint p;
    p.t = t;
    p.tau = tau;
    p.value = lower ? detail::green_lower(lambda, s, sigma) : detail::green_upper(lambda, s, sigma);
    if (left)
        p.branch = lower ? GreenBranch::left_upper : GreenBranch::left_lower;
    else
        p.branch = lower ? GreenBranch::right_lower : GreenBranch::right_upper;
    return p;
}

inline double green_eval(FracOrder mu, double t, double tau, DiagonalSide side = DiagonalSide::memory) {
    return green_point(mu, t, tau, side).value;
}

/// Plain-side value minus memory-side value on the diagonal tau = t.
inline double green_diagonal_jump(FracOrder mu, double t) {
    if (!(std::abs(t) <= 1.0))
        throw InvalidArgument(fmt::format("diagonal jump: t = {} outside [-1,1]", t));
    return green_eval(mu, t, t, DiagonalSide::plain) - green_eval(mu, t, t, DiagonalSide::memory);
}

struct GreenSup {
    double value = 0.0;
    double t = 0.0;
    double tau = 0.0;
};

/// Brute-force maximum of G over a density x density tensor grid on each
/// same-sign square, both diagonal sides included. Ties keep the first point
/// in traversal order (right square, then left; row-major in t).
inline GreenSup green_sup(FracOrder mu, std::size_t grid_density) {
    if (grid_density < 2) throw InvalidArgument("green_sup: grid density must be at least 2");
    const double step = 1.0 / static_cast<double>(grid_density - 1);
    GreenSup best{-INFINITY, 0.0, 0.0};
    for (double sign : {1.0, -1.0}) {
        for (std::size_t i = 0; i < grid_density; ++i) {
            const double t = sign * (i + 1 == grid_density ? 1.0 : static_cast<double>(i) * step);
            for (std::size_t j = 0; j < grid_density; ++j) {
                const double tau = sign * (j + 1 == grid_density ? 1.0 : static_cast<double>(j) * step);
                for (DiagonalSide side : {DiagonalSide::memory, DiagonalSide::plain}) {
                    if (side == DiagonalSide::plain && t != tau) continue;
                    const double g = green_eval(mu, t, tau, side);
                    if (g > best.value) best = {g, t, tau};
                }
            }
        }
    }
    return best;
}

/// The closed-form supremum 2/(1+exp(-2 lambda)) = 1 + tanh(lambda).
inline double green_sup_closed_form(FracOrder mu) {
    const double lambda = rate_of(mu).value();
    return 2.0 / (1.0 + std::exp(-2.0 * lambda));
}

/// x(t) = int_0^1 G(t,tau) y(tau) dtau with outputs at the breakpoints of a
/// mesh on [0,1]. Since every output lies on a breakpoint, each cell sits
/// entirely on one side of the diagonal and the kernel rows are precomputed.
class GreenOperator {
public:
    GreenOperator(FracOrder mu, Mesh mesh) : mu_(mu), mesh_(std::move(mesh)) {
        if (mesh_.a() != 0.0 || mesh_.b() != 1.0)
            throw InvalidArgument("GreenOperator: mesh must span [0,1]");
        const double lambda = rate_of(mu_).value();
        const auto t = mesh_.breakpoints();
        const auto tau = mesh_.nodes();
        const auto w = mesh_.weights();
        cols_ = tau.size();
        kernel_.resize(t.size() * cols_);
        // Factored branches: exp(-lambda tau) sinh(lambda(1-t)) and cosh(lambda t) exp(lambda(1-tau)),
        // both over cosh(lambda). No cancellation, and the row t = 1 is exactly zero.
        const double cosh_l = std::cosh(lambda);
        for (std::size_t i = 0; i < t.size(); ++i) {
            double* row = kernel_.data() + i * cols_;
            const double sh = std::sinh(lambda * (1.0 - t[i])) / cosh_l;
            const double ch = std::cosh(lambda * t[i]) / cosh_l;
            for (std::size_t k = 0; k < cols_; ++k) {
                const double g = tau[k] < t[i] ? std::exp(-lambda * tau[k]) * sh
                                               : ch * std::exp(lambda * (1.0 - tau[k]));
                row[k] = g * w[k];
            }
        }
    }

    FracOrder order() const { return mu_; }
    const Mesh& mesh() const { return mesh_; }
    std::span<const double> output_nodes() const { return mesh_.breakpoints(); }

    /// y sampled at the mesh quadrature nodes; result at the breakpoints.
    std::vector<double> apply(std::span<const double> y_at_nodes) const {
        if (y_at_nodes.size() != cols_) throw InvalidArgument("GreenOperator: sample count mismatch");
        const std::size_t rows = mesh_.breakpoints().size();
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* row = kernel_.data() + i * cols_;
            double acc = 0.0;
            for (std::size_t k = 0; k < cols_; ++k) acc += row[k] * y_at_nodes[k];
            out[i] = acc;
        }
        return out;
    }

    template <class F>
    std::vector<double> sample(F&& y) const {
        const auto tau = mesh_.nodes();
        std::vector<double> v(tau.size());
        for (std::size_t k = 0; k < tau.size(); ++k) {
            v[k] = y(tau[k]);
            if (!std::isfinite(v[k]))
                throw NumericalError(fmt::format("integrand is not finite at node {}", tau[k]));
        }
        return v;
    }

    SymmetricGridFunction apply_to(std::span<const double> y_at_nodes) const {
        auto v = apply(y_at_nodes);
        const auto t = mesh_.breakpoints();
        return {std::vector<double>(t.begin(), t.end()), std::move(v)};
    }

private:
    FracOrder mu_;
    Mesh mesh_;
    std::size_t cols_ = 0;
    std::vector<double> kernel_;
};

inline constexpr double origin_value_tolerance = 1e-12;

/// Integral representation of the linear problem for a symmetric right-hand
/// side with y(0) = 0. The mesh spans [0,1]; the result lives on its breakpoints.
inline SymmetricGridFunction apply_green(FracOrder mu, const SymmetricGridFunction& y, const Mesh& mesh) {
    if (std::abs(y(0.0)) > origin_value_tolerance)
        throw InvalidArgument(fmt::format("apply_green: y(0) = {} but must vanish", y(0.0)));
    if (mesh.a() != 0.0 || mesh.b() != 1.0) throw InvalidArgument("apply_green: mesh must span [0,1]");
    GreenOperator op(mu, mesh);
    return op.apply_to(op.sample([&](double tau) { return y(tau); }));
}

namespace detail {

/// Gauss rule on [lo,hi], with the dist = h u^2 substitution toward hi when requested.
template <class F>
double integrate_piece(F&& fn, double lo, double hi, const GaussRule& g, bool singular_hi) {
    if (!(hi > lo)) return 0.0;
    const double h = hi - lo;
    double acc = 0.0;
    const std::size_t n = g.nodes.size();
    for (std::size_t k = 0; k < n; ++k) {
        double x, w;
        if (singular_hi) {
            const double u = g.nodes[n - 1 - k];
            x = hi - h * u * u;
            // Distances below the spacing of doubles near hi would land on hi itself.
            if (x >= hi) x = std::nextafter(hi, lo);
            w = g.weights[n - 1 - k] * h * 2.0 * u;
        } else {
            x = lo + h * g.nodes[k];
            w = g.weights[k] * h;
        }
        const double v = fn(x);
        if (!std::isfinite(v)) throw NumericalError(fmt::format("integrand is not finite at node {}", x));
        acc += w * v;
    }
    return acc;
}

/// Index of the cell of the breakpoint list containing s (the last cell for s = b).
inline std::size_t locate_cell(std::span<const double> bp, double s) {
    const auto it = std::upper_bound(bp.begin(), bp.end(), s);
    std::size_t c = it == bp.begin() ? 0 : static_cast<std::size_t>(it - bp.begin()) - 1;
    return std::min(c, bp.size() - 2);
}

}  // namespace detail

/// Direct kernel quadrature of int_Lambda G(t,tau) y(tau) dtau at one point t in [-1,1],
/// splitting the integral at tau = t. The mesh spans [0,1] in |tau|; y is called
/// at tau carrying the sign of t. No condition on y(0) is imposed.
template <class F>
double green_integral(FracOrder mu, F&& y, double t, const Mesh& mesh) {
    if (mesh.a() != 0.0 || mesh.b() != 1.0) throw InvalidArgument("green_integral: mesh must span [0,1]");
    if (!(std::abs(t) <= 1.0)) throw InvalidArgument("green_integral: t outside [-1,1]");
    const double lambda = rate_of(mu).value();
    const double sign = t < 0.0 ? -1.0 : 1.0;
    const double s = std::abs(t);
    const auto bp = mesh.breakpoints();
    const auto x = mesh.nodes();
    const auto w = mesh.weights();
    const std::size_t split = detail::locate_cell(bp, s);
    const bool sing_right = has_end(mesh.singular_at(), SingularEnd::right);
    const GaussRule g = gauss_legendre_unit(mesh.nodes_per_cell());

    auto lower = [&](double sigma) { return detail::green_lower(lambda, s, sigma) * y(sign * sigma); };
    auto upper = [&](double sigma) { return detail::green_upper(lambda, s, sigma) * y(sign * sigma); };

    double total = 0.0;
    for (std::size_t c = 0; c < mesh.cells(); ++c) {
        double cell = 0.0;
        if (c == split && s > bp[c] && s < bp[c + 1]) {
            const bool last = c + 1 == mesh.cells() && sing_right;
            cell = detail::integrate_piece(lower, bp[c], s, g, false) +
                   detail::integrate_piece(upper, s, bp[c + 1], g, last);
        } else {
            const bool below = bp[c + 1] <= s;
            const auto [first, end] = mesh.cell_nodes(c);
            for (std::size_t k = first; k < end; ++k) {
                const double v = below ? lower(x[k]) : upper(x[k]);
                if (!std::isfinite(v))
                    throw NumericalError(fmt::format("integrand is not finite at node {}", x[k]));
                cell += w[k] * v;
            }
        }
        total += cell;
    }
    return total;
}

/// Values of int_0^1 G(t,tau) y(tau) dtau at many points t in [0,1] in O(cells)
/// total work, through the factorization
///
///   G(t,tau) = exp(-lambda tau) sinh(lambda(1-t)) / cosh(lambda)   (tau <= t)
///   G(t,tau) = cosh(lambda t) exp(lambda(1-tau)) / cosh(lambda)    (tau >= t)
///
/// Both terms are nonnegative for y >= 0, so values near t = 1 keep their
/// relative accuracy. y is called at the mesh nodes once and on one sub-rule
/// per target falling strictly inside a cell.
template <class F>
std::vector<double> green_integral_many(FracOrder mu, F&& y, std::span<const double> targets,
                                        const Mesh& mesh) {
    if (mesh.a() != 0.0 || mesh.b() != 1.0)
        throw InvalidArgument("green_integral_many: mesh must span [0,1]");
    const double lambda = rate_of(mu).value();
    const auto bp = mesh.breakpoints();
    const auto x = mesh.nodes();
    const auto w = mesh.weights();
    const std::size_t cells = mesh.cells();

    // below[c] = int_0^{bp[c]} exp(-lambda tau) y,  above[c] = int_{bp[c]}^1 exp(lambda(1-tau)) y
    std::vector<double> below(cells + 1, 0.0), above(cells + 1, 0.0), cell_above(cells, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
        const auto [first, last] = mesh.cell_nodes(c);
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            const double v = y(x[k]);
            if (!std::isfinite(v)) throw NumericalError(fmt::format("integrand is not finite at node {}", x[k]));
            lo += w[k] * std::exp(-lambda * x[k]) * v;
            hi += w[k] * std::exp(lambda * (1.0 - x[k])) * v;
        }
        below[c + 1] = below[c] + lo;
        cell_above[c] = hi;
    }
    for (std::size_t c = cells; c-- > 0;) above[c] = above[c + 1] + cell_above[c];

    const GaussRule g = gauss_legendre_unit(mesh.nodes_per_cell());
    const bool sing_right = has_end(mesh.singular_at(), SingularEnd::right);
    const double cosh_l = std::cosh(lambda);
    std::vector<double> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double t = targets[i];
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("green_integral_many: target outside [0,1]");
        const std::size_t c = detail::locate_cell(bp, t);
        double lo, hi;
        if (t == bp[c]) {
            lo = below[c];
            hi = above[c];
        } else if (t == bp[c + 1]) {
            lo = below[c + 1];
            hi = above[c + 1];
        } else {
            lo = below[c] + detail::integrate_piece(
                                [&](double tau) { return std::exp(-lambda * tau) * y(tau); }, bp[c], t, g,
                                false);
            hi = above[c + 1] + detail::integrate_piece(
                                    [&](double tau) { return std::exp(lambda * (1.0 - tau)) * y(tau); }, t,
                                    bp[c + 1], g, sing_right && c + 1 == cells);
        }
        out[i] = std::sinh(lambda * (1.0 - t)) / cosh_l * lo + std::cosh(lambda * t) / cosh_l * hi;
    }
    return out;
}

}  // namespace cfbvp
