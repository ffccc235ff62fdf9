#pragma once

// Problem description: order, truncation level, the five expressions and the
// numerical knobs, plus a reader for the key = value problem file format.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/cf_calculus.hpp"
#include "cfbvp/error.hpp"
#include "cfbvp/expr.hpp"
#include "cfbvp/mesh.hpp"

namespace cfbvp {

struct Numerics {
    std::size_t mesh_cells = 256;
    double mesh_gamma = Mesh::default_gamma;
    std::size_t nodes_per_cell = Mesh::default_nodes_per_cell;
    std::vector<std::size_t> m_schedule{16, 32, 64, 128};
    double omega = 1.0;
    double inner_tol = 1e-11;
    double inter_m_tol = 1e-2;
    std::size_t max_iter = 500;
    /// Fraction of eps_max used as eps.
    double epsilon_fraction = 0.5;
    /// Lattice points per axis for the sampled inequality checks.
    std::size_t check_density = 41;
    /// Use 1 in place of the measured kernel supremum in the existence ratio.
    bool strict_paper_bound = false;

    static constexpr std::size_t max_cells = 4096;
    static constexpr std::size_t min_cells = 8;

    void validate() const {
        if (mesh_cells < min_cells || mesh_cells > max_cells)
            throw ConfigError(fmt::format("mesh.cells must lie in [{}, {}], got {}", min_cells, max_cells, mesh_cells));
        if (!(mesh_gamma >= 1.0 && mesh_gamma <= 8.0))
            throw ConfigError(fmt::format("mesh.gamma must lie in [1, 8], got {}", mesh_gamma));
        if (nodes_per_cell < 2 || nodes_per_cell > 32)
            throw ConfigError(fmt::format("mesh.nodes_per_cell must lie in [2, 32], got {}", nodes_per_cell));
        if (m_schedule.empty()) throw ConfigError("solver.m_schedule is empty");
        for (std::size_t i = 0; i < m_schedule.size(); ++i) {
            if (m_schedule[i] == 0) throw ConfigError("solver.m_schedule entries must be positive");
            if (i > 0 && m_schedule[i] <= m_schedule[i - 1])
                throw ConfigError("solver.m_schedule must be strictly increasing");
        }
        if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError(fmt::format("solver.omega must lie in (0, 1], got {}", omega));
        if (!(inner_tol > 0.0) || !std::isfinite(inner_tol)) throw ConfigError("solver.inner_tol must be positive");
        if (!(inter_m_tol > 0.0) || !std::isfinite(inter_m_tol)) throw ConfigError("solver.inter_m_tol must be positive");
        if (max_iter == 0) throw ConfigError("solver.max_iter must be positive");
        if (!(epsilon_fraction > 0.0 && epsilon_fraction < 1.0))
            throw ConfigError(fmt::format("solver.epsilon_fraction must lie in (0, 1), got {}", epsilon_fraction));
        if (check_density < 3 || check_density > 2001)
            throw ConfigError(fmt::format("check.density must lie in [3, 2001], got {}", check_density));
    }

    Mesh mesh() const { return Mesh::build(0.0, 1.0, mesh_cells, mesh_gamma, SingularEnd::right, nodes_per_cell); }
};

struct ProblemSpec {
    double mu = 1.5;
    double R = 1.0;
    Expr f, q, u, v, psi;
    std::string f_text, q_text, u_text, v_text, psi_text;
    Numerics numerics;

    FracOrder order() const { return FracOrder(mu); }

    /// Checks ranges and the variables each expression may use.
    void validate() const {
        if (!(mu > 1.0 && mu < 2.0)) throw ConfigError(fmt::format("mu must lie in (1, 2), got {}", mu));
        if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError(fmt::format("R must be positive and finite, got {}", R));
        check_vars("f", f, {Var::t, Var::x});
        check_vars("q", q, {Var::s});
        check_vars("u", u, {Var::x});
        check_vars("v", v, {Var::x});
        check_vars("psi", psi, {Var::s, Var::R});
        numerics.validate();
    }

    double eval_f(double t, double x) const { return f.eval(Bindings().set(Var::t, t).set(Var::x, x)); }
    double eval_q(double s) const { return q.eval(Bindings().set(Var::s, s)); }
    double eval_u(double x) const { return u.eval(Bindings().set(Var::x, x)); }
    double eval_v(double x) const { return v.eval(Bindings().set(Var::x, x)); }
    double eval_psi(double s) const { return psi.eval(Bindings().set(Var::s, s).set(Var::R, R)); }

private:
    static void check_vars(const char* key, const Expr& e, std::initializer_list<Var> allowed) {
        for (Var v : {Var::t, Var::x, Var::s, Var::R}) {
            if (!e.uses(v)) continue;
            bool ok = false;
            for (Var a : allowed) ok = ok || a == v;
            if (!ok) throw ConfigError(fmt::format("{} may not use the variable '{}'", key, var_name(v)));
        }
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_real(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
    return v;
}

inline std::size_t parse_count(std::string_view key, std::string_view text) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError(fmt::format("{}: '{}' is not a nonnegative integer", key, text));
    return v;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

inline Expr parse_expr_key(std::string_view key, std::string_view text) {
    try {
        return Expr::parse(text);
    } catch (const ParseError& e) {
        throw ConfigError(fmt::format("{}: {} in '{}'", key, e.what(), text));
    }
}

}  // namespace detail

/// Parse the key = value format. '#' starts a comment; blank lines are skipped.
/// Required keys: mu, R, f, q, u, v, psi. Unknown or repeated keys are errors.
inline ProblemSpec parse_problem(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
        if (!kv.emplace(key, value).second) throw ConfigError(fmt::format("line {}: key '{}' repeated", line_no, key));
    }

    for (const char* k : {"mu", "R", "f", "q", "u", "v", "psi"})
        if (!kv.contains(k)) throw ConfigError(fmt::format("missing required key '{}'", k));

    ProblemSpec p;
    for (const auto& [key, value] : kv) {
        if (key == "mu") p.mu = detail::parse_real(key, value);
        else if (key == "R") p.R = detail::parse_real(key, value);
        else if (key == "f") p.f_text = value, p.f = detail::parse_expr_key(key, value);
        else if (key == "q") p.q_text = value, p.q = detail::parse_expr_key(key, value);
        else if (key == "u") p.u_text = value, p.u = detail::parse_expr_key(key, value);
        else if (key == "v") p.v_text = value, p.v = detail::parse_expr_key(key, value);
        else if (key == "psi") p.psi_text = value, p.psi = detail::parse_expr_key(key, value);
        else if (key == "mesh.cells") p.numerics.mesh_cells = detail::parse_count(key, value);
        else if (key == "mesh.gamma") p.numerics.mesh_gamma = detail::parse_real(key, value);
        else if (key == "mesh.nodes_per_cell") p.numerics.nodes_per_cell = detail::parse_count(key, value);
        else if (key == "solver.m_schedule") {
            p.numerics.m_schedule.clear();
            std::string_view rest = value;
            while (true) {
                const auto comma = rest.find(',');
                p.numerics.m_schedule.push_back(detail::parse_count(key, detail::trim(rest.substr(0, comma))));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        }
        else if (key == "solver.omega") p.numerics.omega = detail::parse_real(key, value);
        else if (key == "solver.inner_tol") p.numerics.inner_tol = detail::parse_real(key, value);
        else if (key == "solver.inter_m_tol") p.numerics.inter_m_tol = detail::parse_real(key, value);
        else if (key == "solver.max_iter") p.numerics.max_iter = detail::parse_count(key, value);
        else if (key == "solver.epsilon_fraction") p.numerics.epsilon_fraction = detail::parse_real(key, value);
        else if (key == "check.density") p.numerics.check_density = detail::parse_count(key, value);
        else if (key == "check.strict_paper_bound") p.numerics.strict_paper_bound = detail::parse_bool(key, value);
        else throw ConfigError(fmt::format("unknown key '{}'", key));
    }
    p.validate();
    return p;
}

inline ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read problem file '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

}  // namespace cfbvp
