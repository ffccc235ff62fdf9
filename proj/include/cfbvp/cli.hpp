#pragma once

// Command-line front end. Exit codes: 0 ok, 1 usage or I/O, 2 hypothesis
// failure, 3 solver failure.

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cfbvp/error.hpp"
#include "cfbvp/fixed_point.hpp"
#include "cfbvp/hypothesis.hpp"
#include "cfbvp/linear_ide.hpp"
#include "cfbvp/problem.hpp"
#include "cfbvp/report.hpp"

namespace cfbvp::cli {

enum ExitCode : int { ok = 0, usage_or_io = 1, hypothesis_failed = 2, solver_failed = 3 };

class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(fmt::format("cannot write '{}'", path.string()));
    f << content;
    if (!f) throw IoError(fmt::format("failed while writing '{}'", path.string()));
}

struct Overrides {
    std::optional<std::size_t> cells;
    std::optional<double> gamma;
    bool strict = false;

    void add_to(CLI::App& sub) {
        sub.add_option("--mesh-cells", cells, "number of mesh cells on [0,1]");
        sub.add_option("--gamma", gamma, "mesh grading exponent toward t = 1");
        sub.add_flag("--strict-paper-bound", strict, "use the constant 1 instead of the sampled kernel supremum");
    }

    void apply(ProblemSpec& spec) const {
        if (cells) spec.numerics.mesh_cells = *cells;
        if (gamma) spec.numerics.mesh_gamma = *gamma;
        if (strict) spec.numerics.strict_paper_bound = true;
        spec.validate();
    }
};

struct Checked {
    A1Report a1;
    std::optional<HypothesisReport> a2;
    std::string text;
    bool passed() const { return a1.passed && a2 && a2->passed; }
};

/// Existence checks are only meaningful once the structural ones pass.
inline Checked run_checks(const ProblemSpec& spec) {
    Checked c;
    c.a1 = check_A1(spec, spec.numerics.check_density);
    c.text = format_problem(spec) + format_a1(c.a1);
    if (c.a1.passed) {
        c.a2 = check_A2(spec, spec.numerics.mesh());
        c.text += format_hypothesis(*c.a2);
    } else {
        c.text += "[existence]\nskipped: structural checks failed\n";
    }
    c.text += fmt::format("overall: {}\n", c.passed() ? "pass" : "FAIL");
    return c;
}

inline int cmd_check(const std::string& path, const std::optional<std::string>& out_dir, const Overrides& ov,
                     std::ostream& out) {
    ProblemSpec spec = load_problem(path);
    ov.apply(spec);
    const Checked c = run_checks(spec);
    out << c.text;
    if (out_dir) {
        write_file(*out_dir, "hypothesis.txt", c.text);
        if (c.a2) write_file(*out_dir, "sigma.csv", sigma_csv(c.a2->sigma));
    }
    return c.passed() ? ok : hypothesis_failed;
}

inline int cmd_solve(const std::string& path, const std::string& out_dir, const Overrides& ov, std::ostream& out) {
    ProblemSpec spec = load_problem(path);
    ov.apply(spec);
    Checked c = run_checks(spec);
    write_file(out_dir, "hypothesis.txt", c.text);
    if (c.a2) write_file(out_dir, "sigma.csv", sigma_csv(c.a2->sigma));
    if (!c.passed()) {
        out << c.text;
        return hypothesis_failed;
    }
    const SolveReport rep = solve(spec, std::move(c.a1), std::move(*c.a2));
    const std::string text = format_problem(spec) + format_solve(rep);
    write_file(out_dir, "solve_report.txt", text);
    if (rep.x.size() > 0 && rep.residual.pointwise.size() > 0) write_file(out_dir, "solution.csv", solution_csv(rep));
    out << format_solve(rep);
    return rep.status == SolveStatus::converged ? ok : solver_failed;
}

inline int cmd_green(double mu, std::size_t grid, const std::string& out_dir, std::ostream& out) {
    const std::string csv = green_csv(FracOrder(mu), grid);
    write_file(out_dir, "green.csv", csv);
    out << fmt::format("wrote {} kernel samples to {}\n", 2 * grid * grid,
                       (std::filesystem::path(out_dir) / "green.csv").string());
    return ok;
}

inline int cmd_audit(const std::vector<double>& mus, const std::optional<std::string>& out_dir, std::ostream& out) {
    std::vector<AuditRow> rows;
    std::string rejected;
    for (double mu : mus) {
        try {
            rows.push_back(audit_kernel(FracOrder(mu)));
        } catch (const Error& e) {
            rejected += fmt::format("skipped mu = {}: {}\n", mu, e.what());
        }
    }
    const std::string text = format_audit(rows) + rejected;
    out << text;
    if (out_dir) write_file(*out_dir, "audit.txt", text);
    return ok;
}

inline int cmd_linear(double mu, const std::string& y_text, std::size_t cells, double gamma, const std::string& out_dir,
                      std::ostream& out) {
    const FracOrder order(mu);
    Expr y;
    try {
        y = Expr::parse(y_text);
    } catch (const ParseError& e) {
        throw ConfigError(fmt::format("y: {}", e.what()));
    }
    for (Var v : {Var::x, Var::s, Var::R})
        if (y.uses(v)) throw ConfigError(fmt::format("y may only use the variable 't', found '{}'", var_name(v)));
    const Mesh mesh = Mesh::build(0.0, 1.0, cells, gamma, SingularEnd::right);
    const auto ys = SymmetricGridFunction::sample(mesh.breakpoints(),
                                                  [&](double t) { return y.eval(Bindings().set(Var::t, t)); });
    const auto sol = solve_linear_bvp(order, ys, mesh);
    const auto res = residual_linear(order, sol.x, ys);
    std::string csv = "t,x,residual\n";
    const auto [t, x] = sol.x.full_grid();
    const auto [tr, r] = res.residual.full_grid();
    for (std::size_t i = 0; i < t.size(); ++i) csv += num17(t[i]) + ',' + num17(x[i]) + ',' + num17(r[i]) + '\n';
    write_file(out_dir, "linear.csv", csv);
    out << fmt::format("x(0): {}\nx(1): {}\nGreen vs closed-form discrepancy: {}\ndifferential residual sup: {}\n",
                       num17(sol.x(0.0)), num17(sol.x(1.0)), num17(sol.closed_form_discrepancy), num17(res.sup));
    return ok;
}

}  // namespace detail

/// Entry point. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symmetric positive solutions of a fractional singular boundary problem"};
    app.name("cfbvp");
    app.require_subcommand(1);

    std::string file, out_dir;
    std::optional<std::string> opt_out;
    detail::Overrides ov;

    auto* check = app.add_subcommand("check", "check the hypotheses of a problem file");
    check->add_option("file", file, "problem file")->required();
    check->add_option("--out", opt_out, "directory for hypothesis.txt and sigma.csv");
    ov.add_to(*check);

    auto* solve_cmd = app.add_subcommand("solve", "check and solve a problem file");
    solve_cmd->add_option("file", file, "problem file")->required();
    solve_cmd->add_option("--out", out_dir, "output directory")->required();
    ov.add_to(*solve_cmd);

    double mu = 1.5;
    std::size_t grid = 101;
    auto* green = app.add_subcommand("green", "sample the Green's function on both squares");
    green->add_option("--mu", mu, "order in (1,2)")->required();
    green->add_option("--grid", grid, "points per axis")->capture_default_str();
    green->add_option("--out", out_dir, "output directory")->required();

    std::vector<double> mus{1.2, 1.5, 1.8};
    auto* audit = app.add_subcommand("audit", "audit the kernel: symmetry, boundary zeros, diagonal jump, supremum");
    audit->add_option("--mu", mus, "orders in (1,2)")->delimiter(',')->capture_default_str();
    audit->add_option("--out", opt_out, "directory for audit.txt");

    std::string y_text;
    std::size_t cells = 256;
    double gamma = Mesh::default_gamma;
    auto* linear = app.add_subcommand("linear", "solve the linear problem for a symmetric right-hand side y(t)");
    linear->add_option("--mu", mu, "order in (1,2)")->required();
    linear->add_option("--y", y_text, "expression in t with y(0) = 0")->required();
    linear->add_option("--mesh-cells", cells, "number of mesh cells on [0,1]")->capture_default_str();
    linear->add_option("--gamma", gamma, "mesh grading exponent toward t = 1")->capture_default_str();
    linear->add_option("--out", out_dir, "output directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_or_io;
    }

    const bool solving = app.got_subcommand(solve_cmd);
    try {
        if (app.got_subcommand(check)) return detail::cmd_check(file, opt_out, ov, out);
        if (solving) return detail::cmd_solve(file, out_dir, ov, out);
        if (app.got_subcommand(green)) return detail::cmd_green(mu, grid, out_dir, out);
        if (app.got_subcommand(audit)) return detail::cmd_audit(mus, opt_out, out);
        if (app.got_subcommand(linear)) return detail::cmd_linear(mu, y_text, cells, gamma, out_dir, out);
    } catch (const HypothesisError& e) {
        err << "hypothesis failure: " << e.what() << '\n';
        return hypothesis_failed;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return solver_failed;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return usage_or_io;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return usage_or_io;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return usage_or_io;
    } catch (const Error& e) {
        err << (solving ? "solver failure: " : "error: ") << e.what() << '\n';
        return solving ? solver_failed : usage_or_io;
    }
    return usage_or_io;
}

}  // namespace cfbvp::cli
