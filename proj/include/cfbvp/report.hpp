#pragma once

// Text and CSV renderings of the reports. Reals are written with 17
// significant digits so every value round-trips; nothing time-dependent is
// emitted, so equal inputs give byte-identical files.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/fixed_point.hpp"
#include "cfbvp/greens_kernel.hpp"
#include "cfbvp/hypothesis.hpp"
#include "cfbvp/problem.hpp"

namespace cfbvp {

inline std::string num17(double v) { return fmt::format("{:.17g}", v); }

namespace detail {

inline void append_items(std::string& s, const std::vector<CheckItem>& items) {
    for (const auto& it : items) {
        s += fmt::format("check: {} | {} | samples {}", it.name, it.passed ? "pass" : "FAIL", it.samples);
        if (!it.witness.empty()) s += " | " + it.witness;
        s += '\n';
    }
}

inline std::string join_values(std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num17(v[i]);
    return s;
}

}  // namespace detail

inline std::string format_problem(const ProblemSpec& p) {
    const Numerics& n = p.numerics;
    std::string s = "[problem]\n";
    s += fmt::format("mu: {}\nR: {}\nf: {}\nq: {}\nu: {}\nv: {}\npsi: {}\n", num17(p.mu), num17(p.R), p.f.unparse(),
                     p.q.unparse(), p.u.unparse(), p.v.unparse(), p.psi.unparse());
    s += fmt::format("mesh.cells: {}\nmesh.gamma: {}\nmesh.nodes_per_cell: {}\n", n.mesh_cells, num17(n.mesh_gamma),
                     n.nodes_per_cell);
    std::string sched;
    for (std::size_t i = 0; i < n.m_schedule.size(); ++i) sched += (i ? ", " : "") + std::to_string(n.m_schedule[i]);
    s += fmt::format("solver.m_schedule: {}\nsolver.omega: {}\nsolver.inner_tol: {}\nsolver.inter_m_tol: {}\n", sched,
                     num17(n.omega), num17(n.inner_tol), num17(n.inter_m_tol));
    s += fmt::format("solver.max_iter: {}\nsolver.epsilon_fraction: {}\ncheck.density: {}\ncheck.strict_paper_bound: {}\n",
                     n.max_iter, num17(n.epsilon_fraction), n.check_density, n.strict_paper_bound);
    return s;
}

inline std::string format_a1(const A1Report& r) {
    std::string s = "[structure]\n";
    s += "note: lattice falsification; a pass means no counterexample was found\n";
    s += fmt::format("density: {}\n", r.density);
    detail::append_items(s, r.items);
    s += fmt::format("result: {}\n", r.passed ? "pass" : "FAIL");
    return s;
}

inline std::string format_hypothesis(const HypothesisReport& r) {
    std::string s = "[existence]\n";
    s += fmt::format("c_mu: {} ({})\n", num17(r.c_mu), r.strict_paper_bound ? "literal constant 1" : "sampled kernel supremum");
    s += fmt::format("sigma_R(0): {}\n", num17(r.sigma0));
    s += fmt::format("I_q: {}\nI_q refinement: {}\n", num17(r.I_q.value()), detail::join_values(r.I_q.history));
    s += fmt::format("I_qu: {}\nI_qu refinement: {}\n", num17(r.I_qu.value()), detail::join_values(r.I_qu.history));
    s += fmt::format("u(R): {}\nv(R): {}\n", num17(r.u_R), num17(r.v_R));
    s += fmt::format("denominator: {}\nratio: {}\neps_max: {}\n", num17(r.denominator), num17(r.ratio), num17(r.eps_max));
    detail::append_items(s, r.items);
    s += fmt::format("result: {}\n", r.passed ? "pass" : "FAIL");
    return s;
}

/// t, sigma_R on the full symmetric grid.
inline std::string sigma_csv(const SymmetricGridFunction& sigma) {
    std::string s = "t,sigma_R\n";
    const auto [t, v] = sigma.full_grid();
    for (std::size_t i = 0; i < t.size(); ++i) s += num17(t[i]) + ',' + num17(v[i]) + '\n';
    return s;
}

/// t, x, sigma_R(|t|), integral-form residual on the full symmetric grid.
inline std::string solution_csv(const SolveReport& r) {
    std::string s = "t,x,sigma_R,residual\n";
    const auto [t, x] = r.x.full_grid();
    const auto [ts, sg] = r.hypothesis.sigma.full_grid();
    const auto [tr, res] = r.residual.pointwise.full_grid();
    for (std::size_t i = 0; i < t.size(); ++i)
        s += num17(t[i]) + ',' + num17(x[i]) + ',' + num17(sg[i]) + ',' + num17(res.empty() ? NAN : res[i]) + '\n';
    return s;
}

inline std::string format_solve(const SolveReport& r) {
    std::string s = "[solve]\n";
    s += fmt::format("status: {}\n", status_name(r.status));
    if (!r.diagnostic.empty()) s += fmt::format("diagnostic: {}\n", r.diagnostic);
    s += fmt::format("eps: {}\nupper bound R - eps: {}\n", num17(r.epsilon), num17(r.hypothesis.R - r.epsilon));
    for (const auto& st : r.stages)
        s += fmt::format("stage: m {} | iterations {} | final step {} | lb margin {} | ub margin {}\n", st.m,
                         st.iterations, num17(st.final_step), num17(st.lb_margin), num17(st.ub_margin));
    s += fmt::format("inter-m deviations: {}\n", detail::join_values(r.inter_m_deviation));
    s += fmt::format("inter-m deviations decreasing: {}\n", r.deviations_monotone ? "yes" : "no");
    s += fmt::format("lb margin min(x - sigma_R): {}\nub margin min(R - eps - x): {}\n", num17(r.lb_margin),
                     num17(r.ub_margin));
    s += fmt::format("min x over interior nodes: {}\n", num17(r.min_interior));
    s += "symmetry: structural (values stored on [0,1], read at |t|)\n";
    s += fmt::format("residual against T_m at last m: {}\n", num17(r.regularized_residual));
    s += fmt::format("residual against the unregularized integral equation: {}\n", num17(r.residual.sup));
    s += fmt::format("differential-form residual on [0, 0.9] (diagnostic): {}", num17(r.differential_residual));
    if (!r.differential_note.empty()) s += " (" + r.differential_note + ")";
    s += '\n';
    return s;
}

/// Kernel samples on both same-sign squares: grid points per axis on [0,1] and their mirror.
inline std::string green_csv(FracOrder mu, std::size_t grid) {
    if (grid < 2) throw InvalidArgument("green: grid must be at least 2");
    // + 0.0 turns the mirrored origin into 0 rather than -0.
    std::string s = "t,tau,branch,value\n";
    for (double sign : {1.0, -1.0}) {
        for (std::size_t i = 0; i < grid; ++i) {
            const double t = sign * static_cast<double>(i) / static_cast<double>(grid - 1) + 0.0;
            for (std::size_t j = 0; j < grid; ++j) {
                const double tau = sign * static_cast<double>(j) / static_cast<double>(grid - 1) + 0.0;
                const auto p = green_point(mu, t, tau);
                s += fmt::format("{},{},{},{}\n", num17(t), num17(tau), branch_name(p.branch), num17(p.value));
            }
        }
    }
    return s;
}

struct AuditRow {
    double mu = 0.0;
    double lambda = 0.0;
    double symmetry_defect = 0.0;
    double boundary_max = 0.0;
    double jump_min = 0.0;
    double jump_max = 0.0;
    double sup_measured = 0.0;
    double sup_closed = 0.0;
    double sup_t = 0.0;
    double sup_tau = 0.0;
};

inline AuditRow audit_kernel(FracOrder mu) {
    AuditRow row;
    row.mu = mu.value();
    row.lambda = rate_of(mu).value();
    constexpr std::size_t n = 201;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            const double tau = static_cast<double>(j) / (n - 1);
            row.symmetry_defect = std::max(row.symmetry_defect, std::abs(green_eval(mu, t, tau) - green_eval(mu, -t, -tau)));
        }
        row.boundary_max = std::max({row.boundary_max, std::abs(green_eval(mu, 1.0, t)), std::abs(green_eval(mu, -1.0, -t))});
    }
    row.jump_min = INFINITY;
    row.jump_max = -INFINITY;
    for (std::size_t i = 0; i < 101; ++i) {
        const double t = -1.0 + 2.0 * static_cast<double>(i) / 100.0;
        const double j = green_diagonal_jump(mu, t);
        row.jump_min = std::min(row.jump_min, j);
        row.jump_max = std::max(row.jump_max, j);
    }
    const auto sup = green_sup(mu, kernel_sup_density);
    row.sup_measured = sup.value;
    row.sup_t = sup.t;
    row.sup_tau = sup.tau;
    row.sup_closed = green_sup_closed_form(mu);
    return row;
}

inline std::string format_audit(std::span<const AuditRow> rows) {
    std::string s = "[kernel audit]\n";
    s += "columns: mu | lambda | max |G(t,tau)-G(-t,-tau)| | max |G(+-1,tau)| | diagonal jump min..max | "
         "sup G (sampled, 401) | 2/(1+exp(-2 lambda)) | |difference| | sup G > 1\n";
    for (const auto& r : rows)
        s += fmt::format("{} | {} | {:.3e} | {:.3e} | {}..{} | {} | {} | {:.3e} | {}\n", num17(r.mu), num17(r.lambda),
                         r.symmetry_defect, r.boundary_max, num17(r.jump_min), num17(r.jump_max), num17(r.sup_measured),
                         num17(r.sup_closed), std::abs(r.sup_measured - r.sup_closed),
                         r.sup_measured > 1.0 ? "yes" : "no");
    bool jumps = !rows.empty(), above_one = false;
    for (const auto& r : rows) {
        jumps = jumps && r.jump_min > 0.5;
        above_one = above_one || r.sup_measured > 1.0;
    }
    if (jumps) s += "finding: G jumps across the diagonal tau = t (see jump column), so it is not continuous there\n";
    if (above_one) s += "finding: the sampled sup G exceeds 1, so the bound G <= 1 does not hold\n";
    return s;
}

}  // namespace cfbvp
