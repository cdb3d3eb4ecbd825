#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "volterra/problem.hpp"

using namespace volterra;

namespace {

Mat scal(double v) {
    Mat m(1, 1);
    m(0, 0) = v;
    return m;
}

/// K1 = 1, K2 = 2, alpha = t/2, f = t: the constant-solution reference case.
ProblemSpec make_p_reg() {
    ProblemSpec p;
    p.name = "P_reg";
    p.m = 1;
    p.n = 2;
    p.T = 1.0;
    p.kernels = {[](double, double) { return scal(1.0); }, [](double, double) { return scal(2.0); }};
    p.kernel_dt = {[](double, double) { return Mat(1, 1); }, [](double, double) { return Mat(1, 1); }};
    p.alphas = {[](double t) { return 0.5 * t; }};
    p.alpha_dt = {[](double) { return 0.5; }};
    p.rhs = [](double t) { return Vec{t}; };
    p.rhs_dt = [](double) { return Vec{1.0}; };
    return p;
}

ProblemSpec make_p_mat() {
    ProblemSpec p;
    p.name = "P_mat";
    p.m = 2;
    p.n = 2;
    p.T = 1.0;
    p.kernels = {[](double, double) { return Mat::diag({1.0, 3.0}); },
                 [](double, double) { return Mat::diag({-1.0, 1.0}); }};
    p.alphas = {[](double t) { return 0.5 * t; }};
    p.rhs = [](double t) { return Vec{t, t}; };
    return p;
}

}  // namespace

TEST_CASE("validate accepts the reference problem") {
    ValidationReport rep = validate(make_p_reg(), 16);
    CHECK(rep.all_pass());
    CHECK(rep.checks.size() == 5);  // each standing hypothesis exactly once
}

TEST_CASE("validate flags broken hypotheses") {
    SUBCASE("f(0) != 0") {
        ProblemSpec p = make_p_reg();
        p.rhs = [](double t) { return Vec{t + 1.0}; };
        p.rhs_dt = nullptr;
        ValidationReport rep = validate(p, 8);
        CHECK_FALSE(rep.all_pass());
        for (const auto& c : rep.checks)
            if (c.name == "f(0)=0") CHECK_FALSE(c.pass);
    }
    SUBCASE("alpha grows past t") {
        ProblemSpec p = make_p_reg();
        p.alphas = {[](double t) { return 2.0 * t; }};
        p.alpha_dt = {[](double) { return 2.0; }};
        ValidationReport rep = validate(p, 8);
        CHECK_FALSE(rep.all_pass());
        for (const auto& c : rep.checks)
            if (c.name == "0<alpha_1(t)<...<alpha_{n-1}(t)<t") CHECK_FALSE(c.pass);
    }
}

TEST_CASE("kernel piece selection") {
    ProblemSpec p = make_p_reg();
    CHECK(kernel_eval(p, 1.0, 0.3)(0, 0) == doctest::Approx(1.0));
    // a point exactly on the curve belongs to the lower piece; one-sided
    // limits across it see the two kernels
    CHECK(kernel_eval(p, 1.0, 0.5)(0, 0) == doctest::Approx(1.0));
    CHECK(kernel_eval(p, 1.0, 0.5 - 1e-12)(0, 0) == doctest::Approx(1.0));
    CHECK(kernel_eval(p, 1.0, 0.5 + 1e-12)(0, 0) == doctest::Approx(2.0));
    CHECK(kernel_eval(p, 1.0, 0.7)(0, 0) == doctest::Approx(2.0));
    CHECK(kernel_eval(p, 1.0, 0.0)(0, 0) == doctest::Approx(1.0));
    CHECK(kernel_eval(p, 1.0, 1.0)(0, 0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(kernel_eval(p, 0.5, 0.7), OutOfDomain);
    CHECK_THROWS_AS(kernel_eval(p, 0.5, -0.1), OutOfDomain);
}

TEST_CASE("numeric taylor data of the reference problem") {
    TaylorData td = taylor_data(make_p_reg(), 2, TaylorMode::Numeric);
    CHECK(td.kernel(0, 0, 0)(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(td.kernel(1, 0, 0)(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(td.kernel(0, 1, 0)(0, 0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(td.f_coeffs[1][0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(td.f_coeffs[2][0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(td.alpha_coeffs[0][1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(td.alpha_coeffs[0][2] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("numeric taylor data of the matrix example") {
    TaylorData td = taylor_data(make_p_mat(), 2, TaylorMode::Numeric);
    CHECK(td.kernel(0, 0, 0)(0, 0) == doctest::Approx(1.0));
    CHECK(td.kernel(0, 0, 0)(1, 1) == doctest::Approx(3.0));
    CHECK(td.kernel(1, 0, 0)(0, 0) == doctest::Approx(-1.0));
    CHECK(td.kernel(1, 0, 0)(1, 1) == doctest::Approx(1.0));
    CHECK(td.f_coeffs[1][0] == doctest::Approx(1.0));
    CHECK(td.f_coeffs[1][1] == doctest::Approx(1.0));
    CHECK(td.alpha_coeffs[0][1] == doctest::Approx(0.5));
}

TEST_CASE("zero right-hand side gives zero coefficients") {
    ProblemSpec p = make_p_reg();
    p.rhs = [](double) { return Vec{0.0}; };
    p.rhs_dt = [](double) { return Vec{0.0}; };
    TaylorData td = taylor_data(p, 3, TaylorMode::Numeric);
    for (int nu = 0; nu <= 3; ++nu) CHECK(norm_inf(td.f_coeffs[static_cast<std::size_t>(nu)]) < 1e-12);
}

TEST_CASE("numeric matches supplied taylor data on polynomial input") {
    // kernels and data polynomial: K1 = 1 + t*s, K2 = 2 - t^2, alpha = t/2 + t^3/8,
    // f = t + 3 t^2
    ProblemSpec p;
    p.m = 1;
    p.n = 2;
    p.T = 1.0;
    p.kernels = {[](double t, double s) { return scal(1.0 + t * s); },
                 [](double t, double) { return scal(2.0 - t * t); }};
    p.alphas = {[](double t) { return 0.5 * t + 0.125 * t * t * t; }};
    p.rhs = [](double t) { return Vec{t + 3.0 * t * t}; };

    const int N = 3;
    TaylorData sup = TaylorData::zeros(N, 1, 2);
    sup.kernel(0, 0, 0) = scal(1.0);
    sup.kernel(0, 1, 1) = scal(1.0);
    sup.kernel(1, 0, 0) = scal(2.0);
    sup.kernel(1, 2, 0) = scal(-1.0);
    sup.alpha_coeffs[0][1] = 0.5;
    sup.alpha_coeffs[0][3] = 0.125;
    sup.f_coeffs[1] = Vec{1.0};
    sup.f_coeffs[2] = Vec{3.0};
    p.taylor = sup;

    TaylorData num = taylor_data(p, N, TaylorMode::Numeric);
    TaylorData given = taylor_data(p, N, TaylorMode::Supplied);
    for (int piece = 0; piece < 2; ++piece)
        for (int nu = 0; nu <= N; ++nu)
            for (int mu = 0; nu + mu <= N; ++mu)
                CHECK(std::abs(num.kernel(piece, nu, mu)(0, 0) - given.kernel(piece, nu, mu)(0, 0)) <
                      1e-6);
    for (int nu = 1; nu <= N; ++nu) {
        CHECK(std::abs(num.f_coeffs[static_cast<std::size_t>(nu)][0] -
                       given.f_coeffs[static_cast<std::size_t>(nu)][0]) < 1e-6);
        CHECK(std::abs(num.alpha_coeffs[0][static_cast<std::size_t>(nu)] -
                       given.alpha_coeffs[0][static_cast<std::size_t>(nu)]) < 1e-6);
    }
}

TEST_CASE("taylor_data rejects degenerate data") {
    ProblemSpec p = make_p_reg();
    p.rhs = [](double t) { return Vec{t + 1.0}; };  // f(0) != 0
    p.rhs_dt = nullptr;
    CHECK_THROWS_AS(taylor_data(p, 2, TaylorMode::Numeric), DegenerateData);

    ProblemSpec q = make_p_reg();
    q.alphas = {[](double t) { return 2.0 * t; }};  // slope outside (0,1)
    q.alpha_dt = {[](double) { return 2.0; }};
    CHECK_THROWS_AS(taylor_data(q, 2, TaylorMode::Numeric), DegenerateData);
}

TEST_CASE("approximation residual of the Taylor polynomial stays bounded") {
    // condition check by sampling: ||K_i - P_i|| / rho^{N+1} bounded as rho halves
    ProblemSpec p;
    p.m = 1;
    p.n = 1;
    p.T = 1.0;
    p.kernels = {[](double t, double s) { return scal(std::exp(t + 0.5 * s)); }};
    p.rhs = [](double t) { return Vec{t}; };
    const int N = 3;
    TaylorData td = taylor_data(p, N, TaylorMode::Numeric);

    auto poly = [&](double t, double s) {
        double acc = 0.0;
        for (int nu = 0; nu <= N; ++nu)
            for (int mu = 0; nu + mu <= N; ++mu)
                acc += td.kernel(0, nu, mu)(0, 0) * std::pow(t, nu) * std::pow(s, mu);
        return acc;
    };
    double prev_ratio = 0.0;
    for (int k = 2; k <= 6; ++k) {
        const double rho = std::pow(0.5, k);
        double worst = 0.0;
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b) {
                const double t = rho * a / 4.0, s = rho * b / 4.0;
                worst = std::max(worst, std::abs(std::exp(t + 0.5 * s) - poly(t, s)));
            }
        const double ratio = worst / std::pow(rho, N + 1);
        if (k > 2) CHECK(ratio < 4.0 * std::max(prev_ratio, 1.0));
        prev_ratio = ratio;
    }
}
