#include "volterra/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "volterra/numdiff.hpp"

namespace volterra {

TaylorData TaylorData::zeros(int N, int m, int n) {
    TaylorData td;
    td.N = N;
    td.m = m;
    td.n = n;
    td.kernel_coeffs.assign(static_cast<std::size_t>(n),
                            std::vector<Mat>(static_cast<std::size_t>((N + 1) * (N + 1)), Mat(m, m)));
    td.f_coeffs.assign(static_cast<std::size_t>(N) + 1, Vec(static_cast<std::size_t>(m), 0.0));
    td.alpha_coeffs.assign(static_cast<std::size_t>(n - 1),
                           std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0));
    return td;
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double alpha_eval(const ProblemSpec& p, int curve, double t) {
    return p.alphas[static_cast<std::size_t>(curve)](t);
}

double alpha_dt_eval(const ProblemSpec& p, int curve, double t) {
    if (!p.alpha_dt.empty() && p.alpha_dt[static_cast<std::size_t>(curve)])
        return p.alpha_dt[static_cast<std::size_t>(curve)](t);
    const double h = 1e-4 * std::max(1.0, p.T);
    const double lo = p.one_sided_evaluators ? 0.0 : -p.T;
    return fd_derivative(p.alphas[static_cast<std::size_t>(curve)], t, h, lo, p.T);
}

Vec rhs_dt_eval(const ProblemSpec& p, double t) {
    if (p.rhs_dt) return p.rhs_dt(t);
    const double h = 1e-4 * std::max(1.0, p.T);
    const double lo = p.one_sided_evaluators ? 0.0 : -p.T;
    Vec d(static_cast<std::size_t>(p.m), 0.0);
    for (int k = 0; k < p.m; ++k) {
        auto comp = [&](double tt) { return p.rhs(tt)[static_cast<std::size_t>(k)]; };
        d[static_cast<std::size_t>(k)] = fd_derivative(comp, t, h, lo, p.T);
    }
    return d;
}

Mat kernel_dt_eval(const ProblemSpec& p, int piece, double t, double s) {
    if (!p.kernel_dt.empty() && p.kernel_dt[static_cast<std::size_t>(piece)])
        return p.kernel_dt[static_cast<std::size_t>(piece)](t, s);
    const double h = 1e-4 * std::max(1.0, p.T);
    const MatFn& k = p.kernels[static_cast<std::size_t>(piece)];
    Mat d(p.m, p.m);
    for (int i = 0; i < p.m; ++i)
        for (int j = 0; j < p.m; ++j) {
            auto comp = [&](double tt) { return k(tt, s)(i, j); };
            const double lo = p.one_sided_evaluators ? s : -p.T;
            d(i, j) = fd_derivative(comp, t, h, lo, p.T);
        }
    return d;
}

bool dt_kernels_vanish(const ProblemSpec& p) {
    for (int i = 0; i < p.n; ++i)
        for (double t : {p.T / 3.0, 2.0 * p.T / 3.0, p.T})
            for (double s : {t / 3.0, 2.0 * t / 3.0})
                if (kernel_dt_eval(p, i, t, s).norm_frobenius() > 1e-14) return false;
    return true;
}

ValidationReport validate(const ProblemSpec& p, int samples) {
    if (samples < 2) throw Error("validate: need at least 2 samples");
    ValidationReport rep;

    // f(0) = 0
    {
        const double v = norm_inf(p.rhs(0.0));
        rep.checks.push_back({"f(0)=0", v <= 1e-9, v});
    }
    // alpha_i(0) = 0
    {
        double worst = 0.0;
        for (int i = 0; i + 1 < p.n; ++i) worst = std::max(worst, std::abs(alpha_eval(p, i, 0.0)));
        rep.checks.push_back({"alpha_i(0)=0", worst <= 1e-9, worst});
    }
    // 0 < alpha_1'(0) < ... < alpha_{n-1}'(0) < 1
    {
        bool ok = true;
        double margin = 1.0;  // smallest gap in the chain
        double prev = 0.0;
        for (int i = 0; i + 1 < p.n; ++i) {
            const double d = alpha_dt_eval(p, i, 0.0);
            margin = std::min(margin, d - prev);
            if (d <= prev) ok = false;
            prev = d;
        }
        margin = std::min(margin, 1.0 - prev);
        if (prev >= 1.0) ok = false;
        rep.checks.push_back({"0<alpha_1'(0)<...<alpha_{n-1}'(0)<1", ok && p.n >= 1, margin});
    }
    // 0 < alpha_1(t) < ... < alpha_{n-1}(t) < t on (0, T]
    {
        bool ok = true;
        double margin = p.T;
        for (int k = 1; k <= samples; ++k) {
            const double t = p.T * k / samples;
            double prev = 0.0;
            for (int i = 0; i + 1 < p.n; ++i) {
                const double a = alpha_eval(p, i, t);
                margin = std::min(margin, a - prev);
                if (a <= prev) ok = false;
                prev = a;
            }
            margin = std::min(margin, t - prev);
            if (prev >= t) ok = false;
        }
        rep.checks.push_back({"0<alpha_1(t)<...<alpha_{n-1}(t)<t", ok, margin});
    }
    // det K_n(t,t) != 0 on samples
    {
        double worst = std::numeric_limits<double>::infinity();
        double scale = 0.0;
        for (int k = 0; k <= samples; ++k) {
            const double t = p.T * k / samples;
            const Mat kn = p.kernels[static_cast<std::size_t>(p.n - 1)](t, t);
            worst = std::min(worst, std::abs(det(kn)));
            scale = std::max(scale, kn.max_abs());
        }
        rep.checks.push_back({"det K_n(t,t)!=0", worst > 1e-12 * std::max(1.0, scale), worst});
    }
    return rep;
}

Mat kernel_eval(const ProblemSpec& p, double t, double s) {
    if (s < 0.0 || s > t * (1.0 + 1e-14) + 1e-300)
        throw OutOfDomain("kernel_eval: point outside 0 <= s <= t");
    for (int i = 0; i + 1 < p.n; ++i)
        if (s <= alpha_eval(p, i, t)) return p.kernels[static_cast<std::size_t>(i)](t, s);
    return p.kernels[static_cast<std::size_t>(p.n - 1)](t, s);
}

namespace {

void check_taylor_invariants(const TaylorData& td) {
    if (norm_inf(td.f_coeffs[0]) > 1e-9)
        throw DegenerateData("taylor_data: f has an order-0 term");
    double prev = 0.0;
    for (std::size_t i = 0; i < td.alpha_coeffs.size(); ++i) {
        const double a1 = td.alpha_coeffs[i][1];
        if (a1 <= prev || a1 >= 1.0)
            throw DegenerateData("taylor_data: alpha_{i,1} ordering violated");
        prev = a1;
    }
}

TaylorData truncate_taylor(const TaylorData& src, int N) {
    TaylorData td = TaylorData::zeros(N, src.m, src.n);
    for (int i = 0; i < src.n; ++i)
        for (int nu = 0; nu <= N; ++nu)
            for (int mu = 0; nu + mu <= N; ++mu) td.kernel(i, nu, mu) = src.kernel(i, nu, mu);
    for (int nu = 0; nu <= N; ++nu) td.f_coeffs[static_cast<std::size_t>(nu)] = src.f_coeffs[static_cast<std::size_t>(nu)];
    for (int i = 0; i + 1 < src.n; ++i)
        for (int nu = 0; nu <= N; ++nu)
            td.alpha_coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(nu)] =
                src.alpha_coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(nu)];
    return td;
}

}  // namespace

TaylorData taylor_data(const ProblemSpec& p, int N, TaylorMode mode) {
    if (mode == TaylorMode::Supplied) {
        if (!p.taylor) throw DegenerateData("taylor_data: no supplied Taylor block");
        if (p.taylor->N < N)
            throw DegenerateData("taylor_data: supplied degree " + std::to_string(p.taylor->N) +
                                 " below requested " + std::to_string(N));
        TaylorData td = truncate_taylor(*p.taylor, N);
        check_taylor_invariants(td);
        return td;
    }

    TaylorData td = TaylorData::zeros(N, p.m, p.n);
    const double span = 0.25 * std::min(1.0, p.T);
    const bool one_sided = p.one_sided_evaluators;

    // right-hand side, componentwise 1-D stencils
    for (int k = 0; k < p.m; ++k) {
        auto comp = [&](double t) { return p.rhs(t)[static_cast<std::size_t>(k)]; };
        const std::vector<double> c = taylor_1d(comp, N, span, one_sided);
        if (std::abs(c[0]) > 1e-9) throw DegenerateData("taylor_data: f(0) != 0");
        for (int nu = 1; nu <= N; ++nu)
            td.f_coeffs[static_cast<std::size_t>(nu)][static_cast<std::size_t>(k)] =
                c[static_cast<std::size_t>(nu)];
    }
    // curves
    for (int i = 0; i + 1 < p.n; ++i) {
        auto a = [&](double t) { return alpha_eval(p, i, t); };
        const std::vector<double> c = taylor_1d(a, N, span, one_sided);
        for (int nu = 1; nu <= N; ++nu)
            td.alpha_coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(nu)] =
                c[static_cast<std::size_t>(nu)];
    }
    // kernels: tensor-product stencils on a (2M+1)^2 grid
    {
        const int M = N + 2;
        const double h = span / M;
        std::vector<double> nodes;
        if (one_sided)
            for (int k = 0; k <= 2 * M; ++k) nodes.push_back(k * h / 2.0);
        else
            for (int k = -M; k <= M; ++k) nodes.push_back(k * h);
        std::vector<std::vector<double>> w(static_cast<std::size_t>(N) + 1);
        for (int d = 0; d <= N; ++d) w[static_cast<std::size_t>(d)] = fd_weights(0.0, nodes, d);
        std::vector<double> fact(static_cast<std::size_t>(N) + 1, 1.0);
        for (int d = 1; d <= N; ++d)
            fact[static_cast<std::size_t>(d)] = fact[static_cast<std::size_t>(d - 1)] * d;

        for (int piece = 0; piece < p.n; ++piece) {
            const MatFn& ker = p.kernels[static_cast<std::size_t>(piece)];
            std::vector<Mat> grid(nodes.size() * nodes.size());
            for (std::size_t a = 0; a < nodes.size(); ++a)
                for (std::size_t b = 0; b < nodes.size(); ++b)
                    grid[a * nodes.size() + b] = ker(nodes[a], nodes[b]);
            for (int nu = 0; nu <= N; ++nu)
                for (int mu = 0; nu + mu <= N; ++mu) {
                    Mat acc(p.m, p.m);
                    for (std::size_t a = 0; a < nodes.size(); ++a) {
                        const double wa = w[static_cast<std::size_t>(nu)][a];
                        if (wa == 0.0) continue;
                        for (std::size_t b = 0; b < nodes.size(); ++b) {
                            const double wb = w[static_cast<std::size_t>(mu)][b];
                            if (wb == 0.0) continue;
                            acc += (wa * wb) * grid[a * nodes.size() + b];
                        }
                    }
                    td.kernel(piece, nu, mu) =
                        (1.0 / (fact[static_cast<std::size_t>(nu)] * fact[static_cast<std::size_t>(mu)])) * acc;
                }
        }
    }
    check_taylor_invariants(td);
    return td;
}

}  // namespace volterra
