#pragma once

// Caputo-Fabrizio left and right derivatives with an exponential memory kernel.
//
// For order mu in (n-1, n) the kernel rate is k = (mu-n+1)/(n-mu) and
//
//   left  (t >= 0):  1/(n-mu)      * int_0^t exp(-k(t-tau)) x^(n)(tau) dtau
//   right (t <= 0):  (-1)^n/(n-mu) * int_t^0 exp(-k(tau-t)) x^(n)(tau) dtau
//
// The boundary problem works with n = 2, where k = (mu-1)/(2-mu) is the rate
// lambda shared by every exponential in the Green's function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include <fmt/format.h>

#include "cfbvp/error.hpp"
#include "cfbvp/mesh.hpp"

namespace cfbvp {

/// Fractional order mu, restricted to the open interval (1,2).
class FracOrder {
public:
    explicit FracOrder(double mu) : mu_(mu) {
        if (!(mu > 1.0 && mu < 2.0))
            throw InvalidArgument(fmt::format("fractional order must lie in (1,2), got {}", mu));
    }
    double value() const { return mu_; }

private:
    double mu_;
};

/// lambda = (mu-1)/(2-mu) > 0.
class KernelRate {
public:
    explicit KernelRate(double lambda) : lambda_(lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw InvalidArgument(fmt::format("kernel rate must be positive and finite, got {}", lambda));
    }
    double value() const { return lambda_; }

private:
    double lambda_;
};

inline KernelRate rate_of(FracOrder mu) {
    return KernelRate((mu.value() - 1.0) / (2.0 - mu.value()));
}

/// Kernel rate for a general order mu in (n-1, n).
inline double cf_kernel_rate(double mu, int n) {
    if (n < 1 || !(mu > n - 1 && mu < n))
        throw InvalidArgument(fmt::format("order {} is not in ({}, {})", mu, n - 1, n));
    return (mu - n + 1) / (n - mu);
}

namespace detail {

inline void check_span(const Mesh& m, double lo, double hi, const char* op) {
    const double tol = 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi));
    if (std::abs(m.a() - lo) > tol || std::abs(m.b() - hi) > tol)
        throw InvalidArgument(fmt::format("{}: mesh spans [{}, {}] but the integral runs over [{}, {}]",
                                          op, m.a(), m.b(), lo, hi));
}

}  // namespace detail

/// Left derivative of order mu in (n-1,n) at t >= 0; xn is the n-th derivative of x,
/// the mesh covers [0,t]. At t = 0 the result is 0 and the mesh is not consulted.
template <class F>
double cf_left_general(F&& xn, double mu, int n, double t, const Mesh& m) {
    const double k = cf_kernel_rate(mu, n);
    if (t < 0.0) throw InvalidArgument("cf_left: t must be nonnegative");
    if (t == 0.0) return 0.0;
    detail::check_span(m, 0.0, t, "cf_left");
    const double v = integrate([&](double tau) { return std::exp(-k * (t - tau)) * xn(tau); }, m);
    return v / (n - mu);
}

/// Right derivative of order mu in (n-1,n) at t <= 0; the mesh covers [t,0].
template <class F>
double cf_right_general(F&& xn, double mu, int n, double t, const Mesh& m) {
    const double k = cf_kernel_rate(mu, n);
    if (t > 0.0) throw InvalidArgument("cf_right: t must be nonpositive");
    if (t == 0.0) return 0.0;
    detail::check_span(m, t, 0.0, "cf_right");
    const double v = integrate([&](double tau) { return std::exp(-k * (tau - t)) * xn(tau); }, m);
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    return sign * v / (n - mu);
}

/// (1/(2-mu)) int_0^t exp(-lambda(t-tau)) x''(tau) dtau, for t >= 0.
template <class F>
double cf_left(F&& x2, FracOrder mu, double t, const Mesh& m) {
    return cf_left_general(std::forward<F>(x2), mu.value(), 2, t, m);
}

/// (1/(2-mu)) int_t^0 exp(-lambda(tau-t)) x''(tau) dtau, for t <= 0.
template <class F>
double cf_right(F&& x2, FracOrder mu, double t, const Mesh& m) {
    return cf_right_general(std::forward<F>(x2), mu.value(), 2, t, m);
}

/// Convenience forms on a uniform mesh over [0,t] or [t,0].
template <class F>
double cf_left(F&& x2, FracOrder mu, double t, std::size_t cells = 256) {
    if (t <= 0.0) return cf_left(std::forward<F>(x2), mu, t, Mesh::build(0.0, 1.0, 1));
    return cf_left(std::forward<F>(x2), mu, t, Mesh::build(0.0, t, cells));
}

template <class F>
double cf_right(F&& x2, FracOrder mu, double t, std::size_t cells = 256) {
    if (t >= 0.0) return cf_right(std::forward<F>(x2), mu, t, Mesh::build(-1.0, 0.0, 1));
    return cf_right(std::forward<F>(x2), mu, t, Mesh::build(t, 0.0, cells));
}

}  // namespace cfbvp
