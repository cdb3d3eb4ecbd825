#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "volterra/asymptotic.hpp"
#include "volterra/picard.hpp"
#include "volterra/steps.hpp"
#include "volterra/verify.hpp"

using namespace volterra;

namespace {

TaylorData td_of(const ProblemSpec& p) { return taylor_data(p, 4, TaylorMode::Supplied); }

double solution_error(const StepsSolution& sol, const std::function<Vec(double)>& exact) {
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.x.mesh.size(); ++k)
        worst = std::max(worst, norm_inf(sol.x.values[k] - exact(sol.x.mesh.nodes[k])));
    return worst;
}

}  // namespace

TEST_CASE("condition (S) across the catalog") {
    SUBCASE("feasible problems") {
        ConditionS reg = check_condition_s(catalog("P_reg").problem, td_of(catalog("P_reg").problem));
        CHECK(reg.q0 == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(reg.c == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(reg.feasible);

        ConditionS conv =
            check_condition_s(catalog("P_conv").problem, td_of(catalog("P_conv").problem));
        CHECK(conv.q0 == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(conv.feasible);
    }
    SUBCASE("parametric families are rejected, consistent with nonuniqueness") {
        ConditionS sing =
            check_condition_s(catalog("P_sing").problem, td_of(catalog("P_sing").problem));
        CHECK(std::abs(sing.q0 - 1.0) <= 1e-12);
        CHECK_FALSE(sing.feasible);

        ConditionS mat = check_condition_s(catalog("P_mat").problem, td_of(catalog("P_mat").problem));
        CHECK(std::abs(mat.q0 - 1.0) <= 1e-12);
        CHECK_FALSE(mat.feasible);
    }
    SUBCASE("nonlinear curves are refused") {
        ProblemSpec p = catalog("P_reg").problem;
        p.alphas = {[](double t) { return 0.5 * t + 0.1 * t * t; }};
        p.alpha_dt = {[](double t) { return 0.5 + 0.2 * t; }};
        CHECK_THROWS_AS(check_condition_s(p, td_of(catalog("P_reg").problem)), NonlinearCurves);
    }
}

TEST_CASE("partition selection") {
    SUBCASE("reference arithmetic") {
        ProblemSpec p = catalog("P_reg").problem;
        StepsConfig cfg = select_partition(p, td_of(p));
        CHECK(cfg.q == doctest::Approx(0.25));
        CHECK(cfg.h == doctest::Approx(0.675));
        CHECK(cfg.eps == doctest::Approx(1.0));
        REQUIRE(cfg.intervals.size() == 2);
        CHECK(cfg.intervals[0].second == doctest::Approx(0.675));
        CHECK(cfg.intervals[1].second == doctest::Approx(1.0));
    }
    SUBCASE("steep top curve shrinks the growth factor") {
        ProblemSpec p = catalog("P_reg").problem;
        p.alphas = {[](double t) { return 0.9 * t; }};
        p.alpha_dt = {[](double) { return 0.9; }};
        StepsConfig cfg = select_partition(p, td_of(p));
        CHECK(cfg.eps == doctest::Approx(1.0 / 9.0));
    }
    SUBCASE("short horizon collapses to a single interval") {
        ProblemSpec p = catalog("P_reg").problem;
        p.T = 0.5;
        StepsConfig cfg = select_partition(p, td_of(p));
        REQUIRE(cfg.intervals.size() == 1);
        CHECK(cfg.intervals[0].second == doctest::Approx(0.5));
    }
    SUBCASE("infeasible problems throw") {
        ProblemSpec p = catalog("P_sing").problem;
        CHECK_THROWS_AS(select_partition(p, td_of(p)), Infeasible);
        ProblemSpec q = catalog("P_mat").problem;
        CHECK_THROWS_AS(select_partition(q, td_of(q)), Infeasible);
    }
}

TEST_CASE("steps solver on the catalog") {
    SUBCASE("constant solution") {
        ProblemSpec p = catalog("P_reg").problem;
        StepsSolution sol = solve_steps(p, select_partition(p, td_of(p)), 1024);
        CHECK(solution_error(sol, [](double) { return Vec{2.0 / 3.0}; }) <= 1e-8);
        for (double g : sol.join_gaps) CHECK(g <= 1e-10);
    }
    SUBCASE("manufactured linear solution at the pinned mesh") {
        ProblemSpec p = catalog("P_man").problem;
        StepsSolution sol = solve_steps(p, select_partition(p, td_of(p)), 1024);
        CHECK(solution_error(sol, [](double t) { return Vec{1.0 + t}; }) <= 2e-6);
    }
    SUBCASE("convolution problem against its manufactured solution") {
        ProblemSpec p = catalog("P_conv").problem;
        StepsSolution sol = solve_steps(p, select_partition(p, td_of(p)), 512);
        auto exact = [](double t) { return Vec{std::cos(t), std::exp(-t)}; };
        CHECK(solution_error(sol, exact) <= 1e-4);
        for (double g : sol.join_gaps) CHECK(g <= 1e-6);
    }
}

TEST_CASE("steps and picard agree where both apply") {
    ProblemSpec p = catalog("P_reg").problem;
    TaylorData td = taylor_data(p, 6, TaylorMode::Supplied);
    StepsSolution st = solve_steps(p, select_partition(p, td), 512);
    AsymptoticResult asym = build_asymptotics(p, td, classify(td, 6), 3);
    PicardSolution pc = solve_residual(p, td, asym.xhat, {}, select_nstar(p, 1.0), 512);
    for (double t : {1e-6, 1e-3, 0.2, 0.7, 1.0}) {
        const Vec a = interp_eval(st.x, t);
        const Vec b = assemble_solution(pc, t);
        CHECK(norm_inf(a - b) <= 1e-6);
    }
}

TEST_CASE("mesh convergence is second order on a curvature-carrying problem") {
    // manufactured with nonconstant kernels and a non-polynomial solution, so
    // the interpolation and quadrature errors are genuinely present
    ProblemSpec skeleton = catalog("P_conv").problem;
    auto xstar = [](double s) { return Vec{std::sin(2.0 * s) + 1.0, std::cos(s)}; };

    std::vector<std::pair<double, double>> errors;
    for (int k = 7; k <= 10; ++k) {
        const int mesh = 1 << k;
        ProblemSpec p = manufacture(skeleton, xstar, 4 * mesh);
        StepsConfig cfg = select_partition(p, TaylorData::zeros(2, p.m, p.n));
        StepsSolution sol = solve_steps(p, cfg, mesh);
        errors.push_back({1.0 / mesh, solution_error(sol, xstar)});
    }
    const double order = convergence_order(errors);
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
}
