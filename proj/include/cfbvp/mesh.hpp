#pragma once

// Graded meshes and composite Gauss-Legendre quadrature.
//
// A mesh on [a,b] may be graded toward either endpoint. With exponent g toward
// b, breakpoint j of N sits at b - (b-a)(1-j/N)^g. The cell touching a flagged
// endpoint integrates with the substitution  dist = h*u^2  (u Gauss nodes on
// [0,1]); this turns a (dist)^(-1/2) singularity into a polynomial and keeps
// every node strictly inside the interval.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/error.hpp"

namespace cfbvp {

enum class SingularEnd : std::uint8_t { none = 0, left = 1, right = 2, both = 3 };

inline bool has_end(SingularEnd flags, SingularEnd end) {
    return (static_cast<unsigned>(flags) & static_cast<unsigned>(end)) != 0;
}

/// Gauss-Legendre rule mapped to [0,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre_unit(std::size_t n) {
    if (n < 1) throw InvalidArgument("gauss_legendre_unit: need at least one node");
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = z;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        // z is the i-th largest root; store ascending on [0,1].
        r.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        r.nodes[i] = 0.5 * (1.0 - z);
        r.weights[n - 1 - i] = 0.5 * w;
        r.weights[i] = 0.5 * w;
    }
    return r;
}

class Mesh {
public:
    static constexpr std::size_t default_nodes_per_cell = 8;
    static constexpr double default_gamma = 3.0;

    /// Mesh with `cells` cells on [a,b], graded with exponent gamma toward each flagged end.
    static Mesh build(double a, double b, std::size_t cells, double gamma = 1.0,
                      SingularEnd singular_at = SingularEnd::none,
                      std::size_t nodes_per_cell = default_nodes_per_cell) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
            throw InvalidArgument(fmt::format("build_mesh: invalid interval [{}, {}]", a, b));
        if (cells < 1) throw InvalidArgument("build_mesh: cell count must be positive");
        if (!(gamma >= 1.0)) throw InvalidArgument("build_mesh: grading exponent must be >= 1");

        std::vector<double> bp(cells + 1);
        const double len = b - a;
        const double n = static_cast<double>(cells);
        for (std::size_t j = 0; j <= cells; ++j) {
            const double xi = static_cast<double>(j) / n;
            double frac = xi;
            switch (singular_at) {
                case SingularEnd::none: break;
                case SingularEnd::left: frac = std::pow(xi, gamma); break;
                case SingularEnd::right: frac = 1.0 - std::pow(1.0 - xi, gamma); break;
                case SingularEnd::both:
                    frac = xi <= 0.5 ? 0.5 * std::pow(2.0 * xi, gamma)
                                     : 1.0 - 0.5 * std::pow(2.0 * (1.0 - xi), gamma);
                    break;
            }
            bp[j] = a + len * frac;
        }
        if (singular_at == SingularEnd::right) {
            // Distances to b computed directly avoid cancellation in the cells near b.
            for (std::size_t j = 1; j < cells; ++j)
                bp[j] = b - len * std::pow(1.0 - static_cast<double>(j) / n, gamma);
        }
        bp.front() = a;
        bp.back() = b;
        return from_breakpoints(std::move(bp), singular_at, nodes_per_cell);
    }

    /// Mesh through the given strictly increasing breakpoints.
    static Mesh from_breakpoints(std::vector<double> breakpoints,
                                 SingularEnd singular_at = SingularEnd::none,
                                 std::size_t nodes_per_cell = default_nodes_per_cell) {
        if (breakpoints.size() < 2)
            throw InvalidArgument("mesh needs at least two breakpoints");
        if (nodes_per_cell < 2) throw InvalidArgument("mesh needs at least two nodes per cell");
        for (std::size_t j = 1; j < breakpoints.size(); ++j)
            if (!(breakpoints[j] > breakpoints[j - 1]))
                throw InvalidArgument(
                    fmt::format("mesh breakpoints must strictly increase (index {})", j));

        Mesh m;
        m.bp_ = std::move(breakpoints);
        m.singular_ = singular_at;
        m.per_cell_ = nodes_per_cell;
        const GaussRule g = gauss_legendre_unit(nodes_per_cell);
        const std::size_t cells = m.bp_.size() - 1;
        m.nodes_.reserve(cells * nodes_per_cell);
        m.weights_.reserve(cells * nodes_per_cell);
        for (std::size_t c = 0; c < cells; ++c) {
            const double lo = m.bp_[c];
            const double hi = m.bp_[c + 1];
            const double h = hi - lo;
            const bool sing_lo = c == 0 && has_end(singular_at, SingularEnd::left);
            const bool sing_hi = c + 1 == cells && has_end(singular_at, SingularEnd::right);
            if (sing_lo && sing_hi) {
                // Single cell singular at both ends: two half-cells.
                const double hh = 0.5 * h;
                for (std::size_t k = 0; k < nodes_per_cell; ++k) {
                    const double u = g.nodes[k];
                    m.push(lo + hh * u * u, g.weights[k] * hh * 2.0 * u);
                }
                for (std::size_t k = 0; k < nodes_per_cell; ++k) {
                    const double u = g.nodes[nodes_per_cell - 1 - k];
                    m.push(hi - hh * u * u, g.weights[nodes_per_cell - 1 - k] * hh * 2.0 * u);
                }
            } else if (sing_lo) {
                for (std::size_t k = 0; k < nodes_per_cell; ++k) {
                    const double u = g.nodes[k];
                    m.push(lo + h * u * u, g.weights[k] * h * 2.0 * u);
                }
            } else if (sing_hi) {
                for (std::size_t k = 0; k < nodes_per_cell; ++k) {
                    const double u = g.nodes[nodes_per_cell - 1 - k];
                    m.push(hi - h * u * u, g.weights[nodes_per_cell - 1 - k] * h * 2.0 * u);
                }
            } else {
                for (std::size_t k = 0; k < nodes_per_cell; ++k)
                    m.push(lo + h * g.nodes[k], g.weights[k] * h);
            }
            m.cell_end_.push_back(m.nodes_.size());
        }
        for (std::size_t k = 0; k < m.nodes_.size(); ++k) {
            if (!(m.nodes_[k] > m.bp_.front() && m.nodes_[k] < m.bp_.back()))
                throw InvalidArgument("mesh is too fine near an endpoint for double precision");
        }
        return m;
    }

    double a() const { return bp_.front(); }
    double b() const { return bp_.back(); }
    std::size_t cells() const { return bp_.size() - 1; }
    std::size_t nodes_per_cell() const { return per_cell_; }
    SingularEnd singular_at() const { return singular_; }

    std::span<const double> breakpoints() const { return bp_; }
    /// All quadrature nodes in ascending order.
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    /// Half-open index range [first, last) of the nodes belonging to cell c.
    std::pair<std::size_t, std::size_t> cell_nodes(std::size_t c) const {
        return {c == 0 ? 0 : cell_end_[c - 1], cell_end_[c]};
    }

private:
    Mesh() = default;

    void push(double x, double w) {
        nodes_.push_back(x);
        weights_.push_back(w);
    }

    std::vector<double> bp_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<std::size_t> cell_end_;
    SingularEnd singular_ = SingularEnd::none;
    std::size_t per_cell_ = default_nodes_per_cell;
};

/// Composite quadrature of fn over the mesh, accumulated cell by cell in ascending order.
template <class F>
double integrate(F&& fn, const Mesh& m) {
    const auto x = m.nodes();
    const auto w = m.weights();
    double total = 0.0;
    for (std::size_t c = 0; c < m.cells(); ++c) {
        const auto [first, last] = m.cell_nodes(c);
        double cell = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            const double v = fn(x[k]);
            if (!std::isfinite(v))
                throw NumericalError(fmt::format("integrand is not finite at node {}", x[k]));
            cell += w[k] * v;
        }
        total += cell;
    }
    return total;
}

}  // namespace cfbvp
