#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "cfbvp/error.hpp"

namespace cfbvp {

/// Weights w_k with sum_k w_k f(xs[k]) ~ f^(order)(x0). Fornberg's recursion.
inline std::vector<double> finite_difference_weights(std::span<const double> xs, double x0,
                                                     std::size_t order) {
    const std::size_t n = xs.size();
    if (n <= order) throw InvalidArgument("finite_difference_weights: too few points");
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

/// Piecewise cubic C^2 interpolant through (x_i, y_i).
class CubicSpline {
public:
    enum class End { not_a_knot, clamped };

    CubicSpline() = default;

    /// Not-a-knot spline; with three points it is the interpolating parabola, with two the line.
    CubicSpline(std::span<const double> x, std::span<const double> y) : x_(x.begin(), x.end()) {
        check(x, y);
        solve(y, End::not_a_knot, 0.0, 0.0);
    }

    /// Clamped spline with prescribed end slopes.
    CubicSpline(std::span<const double> x, std::span<const double> y, double slope_first,
                double slope_last)
        : x_(x.begin(), x.end()) {
        check(x, y);
        solve(y, End::clamped, slope_first, slope_last);
    }

    /// Clamped spline whose end slopes come from one-sided differences on `stencil` points.
    static CubicSpline with_estimated_slopes(std::span<const double> x, std::span<const double> y,
                                             std::size_t stencil = 6) {
        if (x.size() < stencil) throw InvalidArgument("spline: too few nodes for the end stencil");
        const auto wl = finite_difference_weights(x.first(stencil), x.front(), 1);
        const auto wr = finite_difference_weights(x.last(stencil), x.back(), 1);
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t k = 0; k < stencil; ++k) {
            d0 += wl[k] * y[k];
            d1 += wr[k] * y[y.size() - stencil + k];
        }
        return CubicSpline(x, y, d0, d1);
    }

    double operator()(double t) const {
        const std::size_t i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    double derivative(double t) const {
        const std::size_t i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
    }

    double second_derivative(double t) const {
        const std::size_t i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double b = (t - x_[i]) / h;
        return (1.0 - b) * m_[i] + b * m_[i + 1];
    }

    std::span<const double> knots() const { return x_; }

private:
    static void check(std::span<const double> x, std::span<const double> y) {
        if (x.size() != y.size()) throw InvalidArgument("spline: node/value size mismatch");
        if (x.size() < 2) throw InvalidArgument("spline: need at least two nodes");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1])) throw InvalidArgument("spline: nodes must strictly increase");
    }

    std::size_t interval(double t) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        const std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    void solve(std::span<const double> y, End end, double d0, double d1) {
        y_.assign(y.begin(), y.end());
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n == 2) return;
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (end == End::not_a_knot && n == 3) {
            const double c = 2.0 * (d[1] - d[0]) / (h[0] + h[1]);
            m_.assign(3, c);
            return;
        }

        // Tridiagonal system sub[i] M[i-1] + diag[i] M[i] + sup[i] M[i+1] = rhs[i].
        std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (d[i] - d[i - 1]);
        }
        std::size_t first = 0, last = n - 1;
        if (end == End::clamped) {
            diag[0] = 2.0 * h[0];
            sup[0] = h[0];
            rhs[0] = 6.0 * (d[0] - d0);
            sub[n - 1] = h[n - 2];
            diag[n - 1] = 2.0 * h[n - 2];
            rhs[n - 1] = 6.0 * (d1 - d[n - 2]);
        } else {
            // Eliminate M0 and M[n-1] through third-derivative continuity at x1 and x[n-2].
            const double h0 = h[0], h1 = h[1];
            diag[1] += h0 * (h0 + h1) / h1;
            sup[1] -= h0 * h0 / h1;
            const double ha = h[n - 3], hb = h[n - 2];
            diag[n - 2] += hb * (ha + hb) / ha;
            sub[n - 2] -= hb * hb / ha;
            first = 1;
            last = n - 2;
        }
        // Thomas algorithm on [first, last].
        for (std::size_t i = first + 1; i <= last; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[last] = rhs[last] / diag[last];
        for (std::size_t i = last; i-- > first;) m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
        if (end == End::not_a_knot) {
            const double h0 = h[0], h1 = h[1];
            m_[0] = ((h0 + h1) * m_[1] - h0 * m_[2]) / h1;
            const double ha = h[n - 3], hb = h[n - 2];
            m_[n - 1] = ((ha + hb) * m_[n - 2] - hb * m_[n - 3]) / ha;
        }
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

}  // namespace cfbvp
