#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "volterra/asymptotic.hpp"
#include "volterra/verify.hpp"

using namespace volterra;

namespace {

const double kLn2 = std::log(2.0);

struct Prepared {
    ProblemSpec p;
    TaylorData td;
    CharacteristicReport rep;
};

Prepared prepare(const std::string& name, int N) {
    Prepared out;
    out.p = catalog(name).problem;
    out.td = taylor_data(out.p, std::max(N, 6), TaylorMode::Supplied);
    out.rep = classify(out.td, std::max(N, 6));
    return out;
}

double worst_coeff(const LogPowerPoly& f) {
    double w = 0.0;
    for (const auto& [key, v] : f.terms) w = std::max(w, v.max_abs());
    return w;
}

}  // namespace

TEST_CASE("residual_operator oracles") {
    SUBCASE("exact constant solution annihilates the operator") {
        Prepared pr = prepare("P_reg", 3);
        LogPowerPoly x(1, 3);
        x.add_term(0, 0, AffineVec(Vec{2.0 / 3.0}));
        CHECK(worst_coeff(residual_operator(pr.p, pr.td, x)) < 1e-14);
    }
    SUBCASE("exact log family annihilates the operator, parameter included") {
        Prepared pr = prepare("P_sing", 3);
        LogPowerPoly x(1, 3);
        x.add_term(0, 1, AffineVec(Vec{1.0 / kLn2}));
        AffineVec c(Vec{0.0});
        c.directions["c1"] = Vec{1.0};
        x.add_term(0, 0, c);
        CHECK(worst_coeff(residual_operator(pr.p, pr.td, x)) < 1e-14);
    }
    SUBCASE("zero guess leaves -f'") {
        Prepared pr = prepare("P_reg", 3);
        LogPowerPoly f = residual_operator(pr.p, pr.td, LogPowerPoly(1, 3));
        CHECK(f.terms.size() == 1);
        CHECK(f.terms.at({0, 0}).base[0] == doctest::Approx(-1.0));
    }
    SUBCASE("integral term contributes for nonconstant kernels") {
        Prepared pr = prepare("P_conv", 3);
        LogPowerPoly x(2, 3);
        x.add_term(0, 0, AffineVec(Vec{1.0, 1.0}));
        LogPowerPoly f = residual_operator(pr.p, pr.td, x);
        // F(const (1,1)) = (2 + 0.5 + t)(1,1) - f'(t), expanded by hand:
        // order 0 cancels (f'(0) = (2.5, 2.5)); order 1 leaves (0, 2.25);
        // order 2 equals -3 f_3 = (17/16, -9/16)
        CHECK(f.terms.count({0, 0}) == 0);
        CHECK(f.terms.at({1, 0}).base[0] == doctest::Approx(0.0));
        CHECK(f.terms.at({1, 0}).base[1] == doctest::Approx(2.25));
        CHECK(f.terms.at({2, 0}).base[0] == doctest::Approx(17.0 / 16.0));
        CHECK(f.terms.at({2, 0}).base[1] == doctest::Approx(-9.0 / 16.0));
    }
}

TEST_CASE("solve_regular_level") {
    Mat b(1, 1);
    b(0, 0) = 1.5;
    CHECK(solve_regular_level(b, {1.0})[0] == doctest::Approx(2.0 / 3.0));
    b(0, 0) = 1.75;
    CHECK(solve_regular_level(b, {1.75})[0] == doctest::Approx(1.0));
    CHECK(solve_regular_level(b, {0.0})[0] == doctest::Approx(0.0));
}

TEST_CASE("solve_singular_level") {
    SUBCASE("scalar simple singular point") {
        Prepared pr = prepare("P_sing", 3);
        DifferenceSystem ds;
        ds.j = 0;
        for (int k = 0; k <= 3; ++k) ds.b_derivs.push_back(b_derivative(pr.td, 0, k));
        ds.b_derivs[0] = b_matrix(pr.td, 0);
        ds.rhs = {AffineVec(Vec{1.0})};
        ParamFactory pf;
        ZPoly x = solve_singular_level(ds, 1, pr.rep.at(0).nullspace, pf);
        REQUIRE(x.size() == 2);
        CHECK(x[1].base[0] == doctest::Approx(1.0 / kLn2));
        CHECK(x[0].base[0] == doctest::Approx(0.0));
        REQUIRE(x[0].directions.size() == 1);
        CHECK(x[0].directions.begin()->second[0] == doctest::Approx(1.0));
    }
    SUBCASE("matrix simple singular point") {
        Prepared pr = prepare("P_mat", 3);
        DifferenceSystem ds;
        ds.j = 0;
        for (int k = 0; k <= 3; ++k) ds.b_derivs.push_back(b_derivative(pr.td, 0, k));
        ds.b_derivs[0] = b_matrix(pr.td, 0);
        ds.rhs = {AffineVec(Vec{1.0, 1.0})};
        ParamFactory pf;
        ZPoly x = solve_singular_level(ds, 1, pr.rep.at(0).nullspace, pf);
        REQUIRE(x.size() == 2);
        CHECK(x[1].base[0] == doctest::Approx(-1.0 / kLn2));
        CHECK(x[1].base[1] == doctest::Approx(0.0));
        CHECK(x[0].base[0] == doctest::Approx(0.0));
        CHECK(x[0].base[1] == doctest::Approx(0.5));
        CHECK(x[0].directions.size() == 1);
    }
    SUBCASE("zero forcing gives the pure homogeneous family") {
        Prepared pr = prepare("P_sing", 3);
        DifferenceSystem ds;
        ds.j = 0;
        for (int k = 0; k <= 3; ++k) ds.b_derivs.push_back(b_derivative(pr.td, 0, k));
        ds.b_derivs[0] = b_matrix(pr.td, 0);
        ds.rhs = {};
        ParamFactory pf;
        ZPoly x = solve_singular_level(ds, 1, pr.rep.at(0).nullspace, pf);
        REQUIRE(x.size() == 2);
        CHECK(norm_inf(x[1].base) < 1e-14);
        CHECK(x[1].directions.empty());
        CHECK(norm_inf(x[0].base) < 1e-14);
        CHECK(x[0].directions.size() == 1);
    }
}

TEST_CASE("build_asymptotics on the catalog") {
    SUBCASE("regular constant solution") {
        Prepared pr = prepare("P_reg", 3);
        AsymptoticResult r = build_asymptotics(pr.p, pr.td, pr.rep, 3);
        CHECK(r.free_params.empty());
        CHECK(r.xhat.terms.size() == 1);
        CHECK(r.xhat.terms.at({0, 0}).base[0] == doctest::Approx(2.0 / 3.0));
        CHECK(std::isinf(r.residual_order));
    }
    SUBCASE("scalar log family") {
        Prepared pr = prepare("P_sing", 3);
        AsymptoticResult r = build_asymptotics(pr.p, pr.td, pr.rep, 3);
        REQUIRE(r.free_params.size() == 1);
        CHECK(r.free_params[0].j == 0);
        CHECK(r.free_params[0].tier == 0);
        CHECK(r.xhat.terms.at({0, 1}).base[0] == doctest::Approx(1.0 / kLn2));
        // family matches the closed form for several bindings
        CatalogEntry e = catalog("P_sing");
        for (double c : {0.0, 3.7}) {
            std::map<std::string, double> bind{{r.free_params[0].name, c}};
            for (double t : {0.01, 0.5, 1.0})
                CHECK(lp_eval(r.xhat, t, bind)[0] ==
                      doctest::Approx(e.closed_form(t, {{"c1", c}})[0]).epsilon(1e-12));
        }
    }
    SUBCASE("matrix family and its canonical form") {
        Prepared pr = prepare("P_mat", 3);
        AsymptoticResult r = build_asymptotics(pr.p, pr.td, pr.rep, 3);
        REQUIRE(r.free_params.size() == 1);
        CHECK(lp_to_string(r.xhat) == "x(t) = (-1.442695*ln t + c1)*e1 + 0.5*e2 + O(t^4)");
        CatalogEntry e = catalog("P_mat");
        std::map<std::string, double> bind{{"c1", 3.7}};
        for (double t : {0.02, 0.3, 1.0}) {
            const Vec a = lp_eval(r.xhat, t, bind);
            const Vec b = e.closed_form(t, {{"c1", 3.7}});
            CHECK(norm_inf(a - b) < 1e-12);
        }
    }
    SUBCASE("manufactured polynomial solution is recovered exactly") {
        Prepared pr = prepare("P_man", 4);
        AsymptoticResult r = build_asymptotics(pr.p, pr.td, pr.rep, 4);
        CHECK(r.free_params.empty());
        CHECK(r.xhat.terms.at({0, 0}).base[0] == doctest::Approx(1.0));
        CHECK(r.xhat.terms.at({1, 0}).base[0] == doctest::Approx(1.0));
        CHECK(r.xhat.terms.size() == 2);
    }
    SUBCASE("analytic solution: coefficients are the Taylor series") {
        Prepared pr = prepare("P_conv", 4);
        AsymptoticResult r = build_asymptotics(pr.p, pr.td, pr.rep, 4);
        CHECK(r.free_params.empty());
        // x*(t) = (cos t, exp(-t))
        const double expected[5][2] = {
            {1.0, 1.0}, {0.0, -1.0}, {-0.5, 0.5}, {0.0, -1.0 / 6.0}, {1.0 / 24.0, 1.0 / 24.0}};
        for (int j = 0; j <= 4; ++j) {
            auto it = r.xhat.terms.find({j, 0});
            Vec v = (it != r.xhat.terms.end()) ? it->second.base : Vec{0.0, 0.0};
            CHECK(v[0] == doctest::Approx(expected[j][0]).epsilon(1e-9));
            CHECK(v[1] == doctest::Approx(expected[j][1]).epsilon(1e-9));
        }
        // genuine nonzero residual of the truncation: order about N + 1
        CHECK(r.residual_order >= 4.5);
    }
}

TEST_CASE("double root: two-parameter log-squared family") {
    // kernels 1, -3, 1 with curves t/4, t/2: B(j) = (1 - 2^{-j})^2, and the
    // differentiated equation reads x(t) + x(t/4) - 2 x(t/2) = 1 with exact
    // solution family x = log2(t)^2 / 2 + c2 log2(t)... (c2 free) + c1.
    ProblemSpec p;
    p.m = 1;
    p.n = 3;
    p.T = 1.0;
    auto cmat = [](double v) {
        Mat m(1, 1);
        m(0, 0) = v;
        return m;
    };
    p.kernels = {[cmat](double, double) { return cmat(1.0); },
                 [cmat](double, double) { return cmat(-3.0); },
                 [cmat](double, double) { return cmat(1.0); }};
    p.kernel_dt = {[cmat](double, double) { return cmat(0.0); },
                   [cmat](double, double) { return cmat(0.0); },
                   [cmat](double, double) { return cmat(0.0); }};
    p.alphas = {[](double t) { return 0.25 * t; }, [](double t) { return 0.5 * t; }};
    p.alpha_dt = {[](double) { return 0.25; }, [](double) { return 0.5; }};
    p.rhs = [](double t) { return Vec{t}; };
    p.rhs_dt = [](double) { return Vec{1.0}; };
    TaylorData td = TaylorData::zeros(4, 1, 3);
    td.kernel(0, 0, 0) = cmat(1.0);
    td.kernel(1, 0, 0) = cmat(-3.0);
    td.kernel(2, 0, 0) = cmat(1.0);
    td.alpha_coeffs[0][1] = 0.25;
    td.alpha_coeffs[1][1] = 0.5;
    td.f_coeffs[1] = Vec{1.0};
    p.taylor = td;

    CharacteristicReport rep = classify(td, 4);
    REQUIRE(rep.at(0).multiplicity == 2);
    AsymptoticResult r = build_asymptotics(p, td, rep, 4);
    CHECK(r.free_params.size() == 2);
    CHECK(r.xhat.terms.at({0, 2}).base[0] == doctest::Approx(1.0 / (2.0 * kLn2 * kLn2)));

    std::map<std::string, double> bind;
    for (const FreeParam& fp : r.free_params) bind[fp.name] = 0.0;
    for (double t : {0.05, 0.4, 0.9}) {
        const double l2 = std::log(t) / kLn2;
        CHECK(lp_eval(r.xhat, t, bind)[0] == doctest::Approx(0.5 * l2 * l2).epsilon(1e-11));
    }
    // the family really solves the first-kind equation
    auto x0 = [&](double s) { return lp_eval(r.xhat, s, bind); };
    CHECK(firstkind_residual(p, x0, {1e-2, 0.1, 0.5, 1.0}) < 1e-8);
    CHECK(std::isinf(r.residual_order));
}

TEST_CASE("parameter count matches the characteristic prediction") {
    for (const std::string& name : catalog_names()) {
        Prepared pr = prepare(name, 4);
        AsymptoticResult r = build_asymptotics(pr.p, pr.td, pr.rep, 4);
        CHECK_MESSAGE(static_cast<int>(r.free_params.size()) == pr.rep.param_count, name);
        // log powers never exceed the cumulative multiplicity bound
        int cumulative = 0;
        for (int j = 0; j <= 4; ++j) cumulative += pr.rep.at(j).multiplicity;
        CHECK(r.xhat.max_ln_power() <= cumulative);
    }
}

TEST_CASE("free parameters only move along annihilated directions") {
    Prepared pr = prepare("P_mat", 3);
    AsymptoticResult r = build_asymptotics(pr.p, pr.td, pr.rep, 3);
    REQUIRE(r.free_params.size() == 1);
    const std::string c = r.free_params[0].name;
    for (double binding : {0.0, 2.0, -5.0}) {
        std::map<std::string, double> bind{{c, binding}};
        auto x = [&](double t) { return lp_eval(r.xhat, t, bind); };
        for (double t : {0.05, 0.7}) CHECK(norm_inf(residual_f_numeric(pr.p, x, t)) < 1e-9);
    }
}
