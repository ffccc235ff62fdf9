#pragma once

// Linear problem  (2-mu) D^mu x + y = lambda^2 * int exp(-lambda|t-tau|) x dtau
// on each half line, its general solutions, the two-point boundary solve and a
// residual check that differentiates sampled data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/cf_calculus.hpp"
#include "cfbvp/error.hpp"
#include "cfbvp/grid_function.hpp"
#include "cfbvp/greens_kernel.hpp"
#include "cfbvp/mesh.hpp"
#include "cfbvp/spline.hpp"

namespace cfbvp {

/// Free constants of a general solution: c1 multiplies cosh(lambda t), c2 sinh(lambda t).
struct GeneralSolutionCoeffs {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// x(t) = c1 cosh(lambda t) + c2 sinh(lambda t) - int_0^t exp(lambda(t-tau)) y(tau) dtau, t in [0,1].
/// The mesh covers [0,t] (ignored when t = 0).
template <class F>
double general_solution_right_half(FracOrder mu, GeneralSolutionCoeffs b, F&& y, double t, const Mesh& m) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument(fmt::format("right half: t = {} outside [0,1]", t));
    const double lambda = rate_of(mu).value();
    double memory = 0.0;
    if (t > 0.0) {
        detail::check_span(m, 0.0, t, "general_solution_right_half");
        memory = integrate([&](double tau) { return std::exp(lambda * (t - tau)) * y(tau); }, m);
    }
    return b.c1 * std::cosh(lambda * t) + b.c2 * std::sinh(lambda * t) - memory;
}

/// x(t) = c1 cosh(lambda t) + c2 sinh(lambda t) - int_t^0 exp(lambda(tau-t)) y(tau) dtau, t in [-1,0].
/// The mesh covers [t,0] (ignored when t = 0).
template <class F>
double general_solution_left_half(FracOrder mu, GeneralSolutionCoeffs a, F&& y, double t, const Mesh& m) {
    if (!(t >= -1.0 && t <= 0.0)) throw InvalidArgument(fmt::format("left half: t = {} outside [-1,0]", t));
    const double lambda = rate_of(mu).value();
    double memory = 0.0;
    if (t < 0.0) {
        detail::check_span(m, t, 0.0, "general_solution_left_half");
        memory = integrate([&](double tau) { return std::exp(lambda * (tau - t)) * y(tau); }, m);
    }
    return a.c1 * std::cosh(lambda * t) + a.c2 * std::sinh(lambda * t) - memory;
}

/// Boundary-fitted solution written as
///   x(t) = C(t) int_0^1 exp(lambda(1-tau)) y dtau - int_0^t exp(lambda(t-tau)) y dtau,
/// evaluated at ascending targets in [0,1]. y is sampled once on the mesh nodes
/// plus one sub-rule for each target falling inside a cell.
template <class F>
std::vector<double> linear_bvp_closed_form(FracOrder mu, F&& y, std::span<const double> targets,
                                           const Mesh& mesh) {
    if (mesh.a() != 0.0 || mesh.b() != 1.0)
        throw InvalidArgument("linear_bvp_closed_form: mesh must span [0,1]");
    const double lambda = rate_of(mu).value();
    const auto bp = mesh.breakpoints();
    const auto x = mesh.nodes();
    const auto w = mesh.weights();

    std::vector<double> yv(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        yv[k] = y(x[k]);
        if (!std::isfinite(yv[k]))
            throw NumericalError(fmt::format("integrand is not finite at node {}", x[k]));
    }
    double boundary = 0.0;
    // prefix[c] = int_0^{bp[c]} exp(-lambda tau) y dtau
    std::vector<double> prefix(mesh.cells() + 1, 0.0);
    for (std::size_t c = 0; c < mesh.cells(); ++c) {
        const auto [first, last] = mesh.cell_nodes(c);
        double cb = 0.0, cp = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            cb += w[k] * std::exp(lambda * (1.0 - x[k])) * yv[k];
            cp += w[k] * std::exp(-lambda * x[k]) * yv[k];
        }
        boundary += cb;
        prefix[c + 1] = prefix[c] + cp;
    }

    const GaussRule g = gauss_legendre_unit(mesh.nodes_per_cell());
    const double cosh_l = std::cosh(lambda);
    std::vector<double> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double t = targets[i];
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("linear_bvp_closed_form: target outside [0,1]");
        const std::size_t c = detail::locate_cell(bp, t);
        double running = prefix[c];
        if (t > bp[c]) {
            // The sub-interval [bp[c], t] never reaches 1 unless t == 1, handled by prefix.
            if (t == bp[c + 1]) {
                running = prefix[c + 1];
            } else {
                running += detail::integrate_piece(
                    [&](double tau) { return std::exp(-lambda * tau) * y(tau); }, bp[c], t, g, false);
            }
        }
        out[i] = std::cosh(lambda * t) / cosh_l * boundary - std::exp(lambda * t) * running;
    }
    return out;
}

struct LinearBvpSolution {
    SymmetricGridFunction x;
    /// max |Green-kernel path - closed-form path| over the output nodes.
    double closed_form_discrepancy = 0.0;
};

/// Solve the linear boundary problem for symmetric y with y(0) = 0 through the
/// Green's function, cross-checked against the closed-form expression.
inline LinearBvpSolution solve_linear_bvp(FracOrder mu, const SymmetricGridFunction& y, const Mesh& mesh) {
    LinearBvpSolution out;
    out.x = apply_green(mu, y, mesh);
    const auto cf = linear_bvp_closed_form(mu, [&](double tau) { return y(tau); }, mesh.breakpoints(), mesh);
    for (std::size_t i = 0; i < cf.size(); ++i)
        out.closed_form_discrepancy =
            std::max(out.closed_form_discrepancy, std::abs(cf[i] - out.x.values()[i]));
    return out;
}

/// One-sided slope x'(0+) of x(t) = int_0^1 G(t,tau) y(tau) dtau from the
/// second-order stencil (-3x(0) + 4x(h) - x(2h)) / (2h). Use side = -1 for x'(0-).
/// y(0) is not required to vanish.
template <class F>
double origin_slope(FracOrder mu, F&& y, const Mesh& mesh, double side = 1.0, double h = 1e-4) {
    const double dir = side < 0.0 ? -1.0 : 1.0;
    const double x0 = green_integral(mu, y, 0.0 * dir, mesh);
    const double x1 = green_integral(mu, y, dir * h, mesh);
    const double x2 = green_integral(mu, y, dir * 2.0 * h, mesh);
    return dir * (-3.0 * x0 + 4.0 * x1 - x2) / (2.0 * h);
}

inline constexpr std::size_t residual_min_nodes = 9;

/// Pointwise residual (2-mu) D^mu x + y - lambda^2 * memory(x) on one half line.
///
/// `nodes` ascend and either lie in [0,1] starting at 0 (right half, left
/// derivative) or in [-1,0] ending at 0 (left half, right derivative). x'' comes
/// from a clamped cubic spline of the samples whose end slopes are six-point
/// one-sided differences; the integrals use Gauss rules on the node cells.
inline std::vector<double> residual_linear_half(FracOrder mu, std::span<const double> nodes,
                                                std::span<const double> x, std::span<const double> y,
                                                std::size_t nodes_per_cell = Mesh::default_nodes_per_cell) {
    const std::size_t n = nodes.size();
    if (n < residual_min_nodes)
        throw InvalidArgument(fmt::format("residual_linear: grid too coarse ({} nodes, need {})", n,
                                          residual_min_nodes));
    if (x.size() != n || y.size() != n) throw InvalidArgument("residual_linear: size mismatch");
    const bool right = nodes.front() == 0.0;
    if (!right && nodes.back() != 0.0)
        throw InvalidArgument("residual_linear: nodes must start or end at 0");

    const double lambda = rate_of(mu).value();
    const CubicSpline s = CubicSpline::with_estimated_slopes(nodes, x);
    auto x2 = [&](double tau) { return s.second_derivative(tau); };
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = nodes[i];
        if (t == 0.0) {
            res[i] = y[i];
            continue;
        }
        std::vector<double> bp = right ? std::vector<double>(nodes.begin(), nodes.begin() + i + 1)
                                       : std::vector<double>(nodes.begin() + i, nodes.end());
        const Mesh m = Mesh::from_breakpoints(std::move(bp), SingularEnd::none, nodes_per_cell);
        double deriv, memory;
        if (right) {
            deriv = cf_left(x2, mu, t, m);
            memory = integrate([&](double tau) { return std::exp(-lambda * (t - tau)) * s(tau); }, m);
        } else {
            deriv = cf_right(x2, mu, t, m);
            memory = integrate([&](double tau) { return std::exp(-lambda * (tau - t)) * s(tau); }, m);
        }
        res[i] = (2.0 - mu.value()) * deriv + y[i] - lambda * lambda * memory;
    }
    return res;
}

struct LinearResidual {
    SymmetricGridFunction residual;
    double sup = 0.0;
};

/// Residual of a symmetric pair (x, y) sampled on the same nodes. Evaluated on
/// the right half; the left half mirrors it.
inline LinearResidual residual_linear(FracOrder mu, const SymmetricGridFunction& x,
                                      const SymmetricGridFunction& y,
                                      std::size_t nodes_per_cell = Mesh::default_nodes_per_cell) {
    if (x.size() != y.size()) throw InvalidArgument("residual_linear: x and y grids differ");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x.nodes()[i] != y.nodes()[i]) throw InvalidArgument("residual_linear: x and y grids differ");
    auto r = residual_linear_half(mu, x.nodes(), x.values(), y.values(), nodes_per_cell);
    LinearResidual out;
    for (double v : r) out.sup = std::max(out.sup, std::abs(v));
    const auto nodes = x.nodes();
    out.residual = SymmetricGridFunction(std::vector<double>(nodes.begin(), nodes.end()), std::move(r));
    return out;
}

}  // namespace cfbvp
