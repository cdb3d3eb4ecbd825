#include "volterra/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "volterra/asymptotic.hpp"
#include "volterra/picard.hpp"
#include "volterra/problem_io.hpp"
#include "volterra/serialize.hpp"
#include "volterra/steps.hpp"
#include "volterra/verify.hpp"

namespace volterra::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string catalog_name;
    std::string input_path;
    int N = 4;
    std::string method = "auto";
    std::vector<std::string> param_args;
    int mesh = 1024;
    double tol = 0.0;  // 0 keeps solver defaults
    std::string output_path;
    std::string report_path;
};

ProblemSpec load(const RunConfig& cfg) {
    if (!cfg.catalog_name.empty()) return catalog(cfg.catalog_name).problem;
    if (!cfg.input_path.empty()) return load_problem_file(cfg.input_path);
    throw Error("one of --catalog or --input is required");
}

std::map<std::string, double> parse_params(const std::vector<std::string>& args) {
    std::map<std::string, double> out;
    for (const std::string& a : args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error("bad --param '" + a + "': expected name=value");
        out[a.substr(0, eq)] = std::stod(a.substr(eq + 1));
    }
    return out;
}

TaylorData taylor_of(const ProblemSpec& p, int N) {
    const int degree = std::max(N, 6);
    if (p.taylor && p.taylor->N >= degree) return taylor_data(p, degree, TaylorMode::Supplied);
    return taylor_data(p, degree, TaylorMode::Numeric);
}

json problem_summary(const ProblemSpec& p, const RunConfig& cfg) {
    json doc = {{"m", p.m}, {"n", p.n}, {"T", p.T}};
    if (!p.name.empty()) doc["name"] = p.name;
    if (!cfg.input_path.empty()) doc["source"] = cfg.input_path;
    return doc;
}

void emit(const json& report, const RunConfig& cfg, std::ostream& out) {
    out << report.dump(2) << "\n";
    if (!cfg.report_path.empty()) {
        std::ofstream f(cfg.report_path);
        if (!f) throw Error("cannot write report file '" + cfg.report_path + "'");
        f << report.dump(2) << "\n";
    }
}

void write_solution_csv(const GridFunction& g, const std::string& path) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw Error("cannot write output file '" + path + "'");
    write_csv(f, g);
}

double solution_residual(const ProblemSpec& p, const std::function<Vec(double)>& x) {
    std::vector<double> samples;
    for (int k = 0; k <= 8; ++k) samples.push_back(1e-3 * std::pow(1000.0, k / 8.0) * p.T);
    return firstkind_residual(p, x, samples);
}

int run_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool with_asympt) {
    const ProblemSpec p = load(cfg);
    const ValidationReport val = validate(p, 32);
    json report = {{"problem", problem_summary(p, cfg)}, {"validation", to_json(val)}};
    if (!val.all_pass()) {
        emit(report, cfg, out);
        err << "validation failed\n";
        return 1;
    }
    const TaylorData td = taylor_of(p, cfg.N);
    const CharacteristicReport rep = classify(td, std::max(cfg.N, 6));
    report["classification"] = to_json(rep);
    if (with_asympt) {
        const AsymptoticResult asym = build_asymptotics(p, td, rep, cfg.N);
        report["asymptotics"] = to_json(asym);
    }
    emit(report, cfg, out);
    return 0;
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ProblemSpec p = load(cfg);
    const ValidationReport val = validate(p, 32);
    json report = {{"problem", problem_summary(p, cfg)}, {"validation", to_json(val)}};
    if (!val.all_pass()) {
        emit(report, cfg, out);
        err << "validation failed\n";
        return 1;
    }
    const TaylorData td = taylor_of(p, cfg.N);
    const CharacteristicReport rep = classify(td, std::max(cfg.N, 6));
    report["classification"] = to_json(rep);

    const AsymptoticResult asym = build_asymptotics(p, td, rep, cfg.N);
    report["asymptotics"] = to_json(asym);

    std::string method = cfg.method;
    json feas;
    if (method == "auto" || method == "steps") {
        ConditionS cond;
        bool nonlinear = false;
        try {
            cond = check_condition_s(p, td);
        } catch (const NonlinearCurves&) {
            cond.feasible = false;
            nonlinear = true;
        }
        feas = {{"q0", cond.q0}, {"c", cond.c}, {"feasible", cond.feasible}};
        if (method == "auto") method = cond.feasible ? "steps" : "picard";
        if (method == "steps" && !cond.feasible) {
            report["solver"] = {{"method", "steps"}, {"condition_s", feas}};
            emit(report, cfg, out);
            if (nonlinear)
                err << "method of steps requires linear curves\n";
            else
                err << "condition (S) infeasible: |D(0)|=" << json(cond.q0).dump() << "\n";
            return 2;
        }
    }

    try {
        if (method == "steps") {
            const StepsConfig scfg = select_partition(p, td);
            StepsSolution sol = solve_steps(p, scfg, cfg.mesh);
            json intervals = json::array();
            for (const auto& [lo, hi] : scfg.intervals) intervals.push_back({lo, hi});
            auto x = [&](double t) { return interp_eval(sol.x, t); };
            report["solver"] = {{"method", "steps"},
                                {"condition_s", feas},
                                {"config",
                                 {{"q", scfg.q},
                                  {"c", scfg.c},
                                  {"h", scfg.h},
                                  {"eps", scfg.eps},
                                  {"intervals", intervals},
                                  {"mesh", cfg.mesh}}},
                                {"iterations", sol.iterations},
                                {"residual", solution_residual(p, x)}};
            write_solution_csv(sol.x, cfg.output_path);
        } else {
            if (method != "picard") throw Error("unknown method '" + method + "'");
            PicardConfig pcfg = select_nstar(p, p.T);
            if (cfg.tol > 0.0) pcfg.tol = cfg.tol;
            std::map<std::string, double> bind;
            for (const FreeParam& fp : asym.free_params) bind[fp.name] = 0.0;
            for (const auto& [name, value] : parse_params(cfg.param_args)) {
                if (!bind.count(name)) throw Error("unknown parameter '" + name + "'");
                bind[name] = value;
            }
            if (!bind.empty()) {
                json inventory = json::object();
                for (const auto& [name, value] : bind) inventory[name] = value;
                report["parameters"] = inventory;
            }
            PicardSolution sol = solve_residual(p, td, asym.xhat, bind, pcfg, cfg.mesh);
            auto x = [&](double t) { return assemble_solution(sol, t); };
            report["solver"] = {{"method", "picard"},
                                {"config",
                                 {{"nstar", pcfg.nstar},
                                  {"epsilon", pcfg.epsilon},
                                  {"q", pcfg.q},
                                  {"weight_l", sol.config.weight_l},
                                  {"mesh", cfg.mesh}}},
                                {"iterations", sol.iteration_history.size()},
                                {"residual", solution_residual(p, x)}};
            // sampled solution on the positive mesh nodes
            GridFunction gx;
            gx.mesh.nodes.assign(sol.u.mesh.nodes.begin() + 1, sol.u.mesh.nodes.end());
            for (double t : gx.mesh.nodes) gx.values.push_back(assemble_solution(sol, t));
            write_solution_csv(gx, cfg.output_path);
        }
    } catch (const Infeasible& e) {
        emit(report, cfg, out);
        err << e.what() << "\n";
        return 2;
    } catch (const Diverged& e) {
        emit(report, cfg, out);
        err << e.what() << "\n";
        return 2;
    } catch (const NoContraction& e) {
        emit(report, cfg, out);
        err << e.what() << "\n";
        return 2;
    } catch (const PreconditionResidual& e) {
        emit(report, cfg, out);
        err << e.what() << "\n";
        return 2;
    }
    emit(report, cfg, out);
    return 0;
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
    if (cfg.catalog_name.empty()) throw Error("verify requires --catalog NAME");
    const CatalogEntry entry = catalog(cfg.catalog_name);
    const ProblemSpec& p = entry.problem;

    json checks = json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool pass, double value) {
        checks.push_back({{"name", name}, {"pass", pass}, {"value", value}});
        all = all && pass;
    };

    const ValidationReport val = validate(p, 32);
    record("hypotheses", val.all_pass(), 0.0);

    const TaylorData td = taylor_of(p, cfg.N);
    const CharacteristicReport rep = classify(td, std::max(cfg.N, 6));
    bool cls_ok = rep.param_count == entry.expected_param_count &&
                  rep.singular_count == static_cast<int>(entry.expected_singular.size());
    for (const ExpectedPoint& ep : entry.expected_singular)
        cls_ok = cls_ok && rep.at(ep.j).cls == ep.cls && rep.at(ep.j).rank == ep.rank &&
                 rep.at(ep.j).multiplicity == ep.multiplicity;
    record("classification", cls_ok, rep.param_count);

    const AsymptoticResult asym = build_asymptotics(p, td, rep, cfg.N);
    record("free_parameter_count",
           static_cast<int>(asym.free_params.size()) == entry.expected_param_count,
           static_cast<double>(asym.free_params.size()));

    if (entry.closed_form) {
        std::map<std::string, double> prm;
        for (const std::string& name : entry.closed_form_params) prm[name] = 0.0;
        auto exact = [&](double t) { return entry.closed_form(t, prm); };
        std::vector<double> samples;
        for (int k = 0; k <= 8; ++k) samples.push_back(1e-3 * std::pow(1000.0, k / 8.0) * p.T);
        const double res = firstkind_residual(p, exact, samples);
        record("closed_form_residual", res <= 1e-8, res);

        std::map<std::string, double> bind;
        for (const FreeParam& fp : asym.free_params) bind[fp.name] = 0.0;
        double worst = 0.0;
        for (double t : samples)
            worst = std::max(worst, norm_inf(lp_eval(asym.xhat, t, bind) - exact(t)));
        record("asymptotics_match_closed_form", worst <= 1e-8, worst);
    }

    const json report = {{"entry", cfg.catalog_name}, {"checks", checks}, {"all_pass", all}};
    emit(report, cfg, out);
    return all ? 0 : 1;
}

int run_catalog(const RunConfig& cfg, const std::string& name, std::ostream& out) {
    if (name.empty()) {
        json names = json::array();
        for (const std::string& n : catalog_names()) names.push_back(n);
        out << names.dump(2) << "\n";
        return 0;
    }
    const json doc = catalog_to_json(name);
    out << doc.dump(2) << "\n";
    if (!cfg.output_path.empty()) {
        std::ofstream f(cfg.output_path);
        if (!f) throw Error("cannot write output file '" + cfg.output_path + "'");
        f << doc.dump(2) << "\n";
    }
    return 0;
}

void add_common(CLI::App* cmd, RunConfig& cfg, bool with_solver) {
    cmd->add_option("--catalog", cfg.catalog_name, "built-in problem name");
    cmd->add_option("--input", cfg.input_path, "problem file (JSON)");
    cmd->add_option("--N", cfg.N, "asymptotic degree")->default_val(4);
    cmd->add_option("--report", cfg.report_path, "write the JSON report here");
    if (with_solver) {
        cmd->add_option("--method", cfg.method, "picard|steps|auto")->default_val("auto");
        cmd->add_option("--param", cfg.param_args, "free parameter binding name=value");
        cmd->add_option("--mesh", cfg.mesh, "mesh intervals")->default_val(1024);
        cmd->add_option("--tol", cfg.tol, "solver tolerance override");
        cmd->add_option("-o,--output", cfg.output_path, "solution CSV path");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"first-kind Volterra equations with piecewise kernels"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string catalog_entry_name;

    CLI::App* analyze = app.add_subcommand("analyze", "validate and classify a problem");
    add_common(analyze, cfg, false);
    CLI::App* asympt = app.add_subcommand("asympt", "build the log-power asymptotics");
    add_common(asympt, cfg, false);
    CLI::App* solve = app.add_subcommand("solve", "compute a numerical solution");
    add_common(solve, cfg, true);
    CLI::App* verify = app.add_subcommand("verify", "run the oracle checks of a catalog entry");
    add_common(verify, cfg, false);
    CLI::App* cat = app.add_subcommand("catalog", "list or export the built-in problems");
    cat->add_option("--name", catalog_entry_name, "entry to export as a problem file");
    cat->add_option("--output", cfg.output_path, "write the problem JSON here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 3;
    }

    try {
        if (analyze->parsed()) return run_analyze(cfg, out, err, false);
        if (asympt->parsed()) return run_analyze(cfg, out, err, true);
        if (solve->parsed()) return run_solve(cfg, out, err);
        if (verify->parsed()) return run_verify(cfg, out);
        return run_catalog(cfg, catalog_entry_name, out);
    } catch (const Infeasible& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const Diverged& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const NoContraction& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const PreconditionResidual& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 3;
    }
}

}  // namespace volterra::cli
