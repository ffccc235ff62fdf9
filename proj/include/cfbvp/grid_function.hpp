#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cfbvp/error.hpp"
#include "cfbvp/spline.hpp"

namespace cfbvp {

/// Even function on [-1,1] sampled on the right half.
///
/// Nodes run 0 = s_0 < ... < s_N = 1. Values at t < 0 are read at |t|, so
/// f(t) == f(-t) holds bit for bit. Between nodes the value is a not-a-knot
/// cubic spline of the samples.
class SymmetricGridFunction {
public:
    SymmetricGridFunction() = default;

    SymmetricGridFunction(std::vector<double> nodes, std::vector<double> values)
        : nodes_(std::move(nodes)), values_(std::move(values)) {
        if (nodes_.size() != values_.size())
            throw InvalidArgument("grid function: node/value size mismatch");
        if (nodes_.size() < 2) throw InvalidArgument("grid function: need at least two nodes");
        if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
            throw InvalidArgument("grid function: nodes must span [0,1] including both ends");
        spline_ = CubicSpline(nodes_, values_);
    }

    /// Sample fn at each node.
    template <class F>
    static SymmetricGridFunction sample(std::span<const double> nodes, F&& fn) {
        std::vector<double> v(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = fn(nodes[i]);
        return {std::vector<double>(nodes.begin(), nodes.end()), std::move(v)};
    }

    double operator()(double t) const {
        const double s = std::abs(t);
        if (s > 1.0) throw InvalidArgument("grid function evaluated outside [-1,1]");
        const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), s);
        if (it != nodes_.end() && *it == s) return values_[static_cast<std::size_t>(it - nodes_.begin())];
        return spline_(s);
    }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return nodes_.size(); }

    /// Nodes -s_N..-s_1, s_0..s_N in ascending order, with their values.
    std::pair<std::vector<double>, std::vector<double>> full_grid() const {
        std::vector<double> t, v;
        t.reserve(2 * nodes_.size() - 1);
        v.reserve(2 * nodes_.size() - 1);
        for (std::size_t i = nodes_.size(); i-- > 1;) {
            t.push_back(-nodes_[i]);
            v.push_back(values_[i]);
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            t.push_back(nodes_[i]);
            v.push_back(values_[i]);
        }
        return {std::move(t), std::move(v)};
    }

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
    CubicSpline spline_;
};

/// Largest |a - b| over shared nodes. The node sets must coincide.
inline double sup_distance(const SymmetricGridFunction& a, const SymmetricGridFunction& b) {
    if (a.size() != b.size()) throw InvalidArgument("sup_distance: grids differ");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.nodes()[i] != b.nodes()[i]) throw InvalidArgument("sup_distance: grids differ");
        d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    }
    return d;
}

}  // namespace cfbvp
