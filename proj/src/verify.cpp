#include "volterra/verify.hpp"

#include <cmath>
#include <limits>

namespace volterra {

namespace {

const double kLn2 = std::log(2.0);

Mat scal(double v) {
    Mat m(1, 1);
    m(0, 0) = v;
    return m;
}

MatFn const_kernel(Mat m) {
    return [m = std::move(m)](double, double) { return m; };
}

constexpr int kCatalogTaylorDegree = 8;

/// Constant-kernel scalar entry shared by P_reg / P_sing / P_man.
ProblemSpec scalar_two_piece(double k1, double k2, VecFn f, VecFn f_dt,
                             std::vector<Vec> f_taylor) {
    ProblemSpec p;
    p.m = 1;
    p.n = 2;
    p.T = 1.0;
    p.kernels = {const_kernel(scal(k1)), const_kernel(scal(k2))};
    p.kernel_dt = {const_kernel(Mat(1, 1)), const_kernel(Mat(1, 1))};
    p.alphas = {[](double t) { return 0.5 * t; }};
    p.alpha_dt = {[](double) { return 0.5; }};
    p.rhs = std::move(f);
    p.rhs_dt = std::move(f_dt);

    TaylorData td = TaylorData::zeros(kCatalogTaylorDegree, 1, 2);
    td.kernel(0, 0, 0) = scal(k1);
    td.kernel(1, 0, 0) = scal(k2);
    td.alpha_coeffs[0][1] = 0.5;
    for (std::size_t nu = 1; nu < f_taylor.size(); ++nu) td.f_coeffs[nu] = f_taylor[nu];
    p.taylor = std::move(td);
    return p;
}

CatalogEntry make_p_reg() {
    CatalogEntry e;
    e.name = "P_reg";
    e.problem = scalar_two_piece(
        1.0, 2.0, [](double t) { return Vec{t}; }, [](double) { return Vec{1.0}; },
        {Vec{0.0}, Vec{1.0}});
    e.problem.name = "P_reg";
    e.closed_form = [](double, const std::map<std::string, double>&) { return Vec{2.0 / 3.0}; };
    e.expected_param_count = 0;
    return e;
}

CatalogEntry make_p_sing() {
    CatalogEntry e;
    e.name = "P_sing";
    e.problem = scalar_two_piece(
        -1.0, 1.0, [](double t) { return Vec{t}; }, [](double) { return Vec{1.0}; },
        {Vec{0.0}, Vec{1.0}});
    e.problem.name = "P_sing";
    e.closed_form = [](double t, const std::map<std::string, double>& prm) {
        return Vec{std::log(t) / kLn2 + prm.at("c1")};
    };
    e.closed_form_params = {"c1"};
    e.expected_singular = {{0, PointClass::SimpleSingular, 0, 1}};
    e.expected_param_count = 1;
    return e;
}

CatalogEntry make_p_man() {
    CatalogEntry e;
    e.name = "P_man";
    e.problem = scalar_two_piece(
        1.0, 2.0, [](double t) { return Vec{1.5 * t + 0.875 * t * t}; },
        [](double t) { return Vec{1.5 + 1.75 * t}; }, {Vec{0.0}, Vec{1.5}, Vec{0.875}});
    e.problem.name = "P_man";
    e.closed_form = [](double t, const std::map<std::string, double>&) { return Vec{1.0 + t}; };
    e.expected_param_count = 0;
    return e;
}

CatalogEntry make_p_mat() {
    CatalogEntry e;
    e.name = "P_mat";
    ProblemSpec p;
    p.name = "P_mat";
    p.m = 2;
    p.n = 2;
    p.T = 1.0;
    p.kernels = {const_kernel(Mat::diag({1.0, 3.0})), const_kernel(Mat::diag({-1.0, 1.0}))};
    p.kernel_dt = {const_kernel(Mat(2, 2)), const_kernel(Mat(2, 2))};
    p.alphas = {[](double t) { return 0.5 * t; }};
    p.alpha_dt = {[](double) { return 0.5; }};
    p.rhs = [](double t) { return Vec{t, t}; };
    p.rhs_dt = [](double) { return Vec{1.0, 1.0}; };

    TaylorData td = TaylorData::zeros(kCatalogTaylorDegree, 2, 2);
    td.kernel(0, 0, 0) = Mat::diag({1.0, 3.0});
    td.kernel(1, 0, 0) = Mat::diag({-1.0, 1.0});
    td.alpha_coeffs[0][1] = 0.5;
    td.f_coeffs[1] = Vec{1.0, 1.0};
    p.taylor = std::move(td);
    e.problem = std::move(p);

    e.closed_form = [](double t, const std::map<std::string, double>& prm) {
        return Vec{-std::log(t) / kLn2 + prm.at("c1"), 0.5};
    };
    e.closed_form_params = {"c1"};
    e.expected_singular = {{0, PointClass::SimpleSingular, 1, 1}};
    e.expected_param_count = 1;
    return e;
}

CatalogEntry make_p_conv() {
    CatalogEntry e;
    e.name = "P_conv";
    ProblemSpec p;
    p.name = "P_conv";
    p.m = 2;
    p.n = 2;
    p.T = 1.0;
    // convolution kernels K2(t-s) = (2 + (t-s)) E, K1 = K2 + E
    p.kernels = {[](double t, double s) { return (3.0 + t - s) * Mat::identity(2); },
                 [](double t, double s) { return (2.0 + t - s) * Mat::identity(2); }};
    p.kernel_dt = {const_kernel(Mat::identity(2)), const_kernel(Mat::identity(2))};
    p.alphas = {[](double t) { return 0.5 * t; }};
    p.alpha_dt = {[](double) { return 0.5; }};
    // f manufactured in closed form from x*(s) = (cos s, exp(-s)):
    //   f1 = 2 sin t + sin(t/2) - cos t + 1
    //   f2 = 2 + t - exp(-t) - exp(-t/2)
    p.rhs = [](double t) {
        return Vec{2.0 * std::sin(t) + std::sin(0.5 * t) - std::cos(t) + 1.0,
                   2.0 + t - std::exp(-t) - std::exp(-0.5 * t)};
    };
    p.rhs_dt = [](double t) {
        return Vec{2.0 * std::cos(t) + 0.5 * std::cos(0.5 * t) + std::sin(t),
                   1.0 + std::exp(-t) + 0.5 * std::exp(-0.5 * t)};
    };

    TaylorData td = TaylorData::zeros(kCatalogTaylorDegree, 2, 2);
    td.kernel(0, 0, 0) = 3.0 * Mat::identity(2);
    td.kernel(0, 1, 0) = Mat::identity(2);
    td.kernel(0, 0, 1) = -1.0 * Mat::identity(2);
    td.kernel(1, 0, 0) = 2.0 * Mat::identity(2);
    td.kernel(1, 1, 0) = Mat::identity(2);
    td.kernel(1, 0, 1) = -1.0 * Mat::identity(2);
    td.alpha_coeffs[0][1] = 0.5;
    double factorial = 1.0;
    for (int k = 1; k <= kCatalogTaylorDegree; ++k) {
        factorial *= k;
        const double half_pow = std::pow(0.5, k);
        double f1;
        if (k % 2 == 1) {
            const double sgn = ((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;  // sin-series sign
            f1 = sgn * (2.0 + half_pow) / factorial;
        } else {
            const double sgn = (k / 2) % 2 == 0 ? 1.0 : -1.0;  // cos-series sign
            f1 = -sgn / factorial;
        }
        const double sgn_exp = k % 2 == 0 ? 1.0 : -1.0;  // (-1)^k
        const double f2 = (k == 1 ? 1.0 : 0.0) - sgn_exp * (1.0 + half_pow) / factorial;
        td.f_coeffs[static_cast<std::size_t>(k)] = Vec{f1, f2};
    }
    p.taylor = std::move(td);
    e.problem = std::move(p);
    e.expected_param_count = 0;
    return e;
}

}  // namespace

std::vector<std::string> catalog_names() { return {"P_reg", "P_sing", "P_mat", "P_man", "P_conv"}; }

CatalogEntry catalog(const std::string& name) {
    if (name == "P_reg") return make_p_reg();
    if (name == "P_sing") return make_p_sing();
    if (name == "P_mat") return make_p_mat();
    if (name == "P_man") return make_p_man();
    if (name == "P_conv") return make_p_conv();
    throw UnknownName("catalog: unknown entry '" + name + "'");
}

double firstkind_residual(const ProblemSpec& p, const std::function<Vec(double)>& x,
                          const std::vector<double>& t_samples, const QuadratureOptions& opt) {
    double worst = 0.0;
    for (double t : t_samples) {
        const Vec lhs = piecewise_integral(p, t, x, KernelSlice::Full, opt);
        const Vec f = p.rhs(t);
        worst = std::max(worst, norm_inf(lhs - f) / std::max(1.0, norm_inf(f)));
    }
    return worst;
}

ProblemSpec manufacture(const ProblemSpec& skeleton, const std::function<Vec(double)>& xstar,
                        int quad_subintervals_per_unit) {
    ProblemSpec p = skeleton;
    p.name = skeleton.name.empty() ? "manufactured" : skeleton.name + "_manufactured";
    p.taylor.reset();
    p.one_sided_evaluators = true;

    QuadratureOptions opt;
    opt.subintervals_per_unit = quad_subintervals_per_unit;

    // f(t) = first-kind operator applied to xstar
    p.rhs = [skeleton, xstar, opt](double t) {
        if (t == 0.0) return Vec(static_cast<std::size_t>(skeleton.m), 0.0);
        return piecewise_integral(skeleton, t, xstar, KernelSlice::Full, opt);
    };
    // f'(t) via the differentiated operator: a zero-rhs copy of the skeleton
    // makes residual_f_numeric return exactly the functional part.
    ProblemSpec hollow = skeleton;
    hollow.rhs = [m = skeleton.m](double) { return Vec(static_cast<std::size_t>(m), 0.0); };
    hollow.rhs_dt = hollow.rhs;
    hollow.taylor.reset();
    p.rhs_dt = [hollow, xstar, opt](double t) {
        return residual_f_numeric(hollow, xstar, t, opt);
    };
    return p;
}

double convergence_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 3) throw DegenerateFit("convergence_order: need at least 3 points");
    double prev_h = std::numeric_limits<double>::infinity();
    for (const auto& [h, err] : errors) {
        if (err <= 0.0) throw DegenerateFit("convergence_order: nonpositive error value");
        if (h <= 0.0 || h >= prev_h) throw DegenerateFit("convergence_order: h must decrease");
        prev_h = h;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(errors.size());
    for (const auto& [h, err] : errors) {
        const double x = std::log(h), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace volterra
