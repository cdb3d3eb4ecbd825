#include "volterra/picard.hpp"

#include <algorithm>
#include <cmath>

namespace volterra {

namespace {

double weighted_norm(const GridFunction& g, const std::vector<Vec>& v, double l) {
    double best = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k)
        best = std::max(best, std::exp(-l * g.mesh.nodes[k]) * norm_inf(v[k]));
    return best;
}

}  // namespace

PicardConfig select_nstar(const ProblemSpec& p, double T_prime, double q_target) {
    PicardConfig cfg;
    cfg.T_prime = T_prime;

    const int samples = 512;
    double eps = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double t = T_prime * k / samples;
        for (int i = 0; i + 1 < p.n; ++i) {
            eps = std::max(eps, std::abs(alpha_dt_eval(p, i, t)));
            eps = std::max(eps, alpha_eval(p, i, t) / t);
        }
        for (int i = 0; i + 1 < p.n; ++i) eps = std::max(eps, std::abs(alpha_dt_eval(p, i, 0.0)));
    }
    if (p.n > 1 && eps >= 1.0)
        throw NoContraction("select_nstar: curve slope bound " + std::to_string(eps) + " >= 1");
    cfg.epsilon = eps;

    // the t-dependent factor of the damping bound
    std::vector<double> factor;
    for (int k = 0; k <= samples; ++k) {
        const double t = T_prime * k / samples;
        const Mat kn = p.kernels[static_cast<std::size_t>(p.n - 1)](t, t);
        Mat inv(p.m, p.m);
        try {
            for (int c = 0; c < p.m; ++c) {
                Vec e(static_cast<std::size_t>(p.m), 0.0);
                e[static_cast<std::size_t>(c)] = 1.0;
                const Vec col = lu_solve(kn, e);
                for (int r = 0; r < p.m; ++r) inv(r, c) = col[static_cast<std::size_t>(r)];
            }
        } catch (const SingularMatrix&) {
            throw NoContraction("select_nstar: K_n(t,t) singular at t = " + std::to_string(t));
        }
        double sum = 0.0;
        for (int i = 0; i + 1 < p.n; ++i) {
            const double ai = alpha_eval(p, i, t);
            const Mat jump = p.kernels[static_cast<std::size_t>(i)](t, ai) -
                             p.kernels[static_cast<std::size_t>(i + 1)](t, ai);
            sum += std::abs(alpha_dt_eval(p, i, t)) * jump.norm_inf();
        }
        factor.push_back(inv.norm_inf() * sum);
    }
    const double worst = *std::max_element(factor.begin(), factor.end());

    for (int nstar = 0; nstar <= 64; ++nstar) {
        const double bound = std::pow(eps, nstar) * worst;
        if (bound <= q_target || p.n == 1) {
            cfg.nstar = nstar;
            cfg.q = bound;
            return cfg;
        }
    }
    throw NoContraction("select_nstar: no damping exponent up to 64 satisfies the bound");
}

PicardSolution solve_residual(const ProblemSpec& p, const TaylorData& td,
                              const LogPowerPoly& xhat,
                              const std::map<std::string, double>& params,
                              const PicardConfig& cfg, int mesh_intervals) {
    if (td.N < cfg.nstar)
        throw PreconditionResidual("solve_residual: Taylor degree below nstar");

    auto xh = [&](double t) { return lp_eval(xhat, t, params); };

    // |F(xhat)| must vanish faster than t^nstar for gamma to stay continuous
    const double order = residual_order_numeric(p, xh);
    if (order < cfg.nstar + 0.5)
        throw PreconditionResidual("solve_residual: residual order " + std::to_string(order) +
                                   " too low for nstar = " + std::to_string(cfg.nstar));

    const Mesh mesh = Mesh::uniform(0.0, cfg.T_prime, mesh_intervals);
    const std::size_t nn = mesh.size();

    // K_n(t,t) per node (factored on demand by lu_solve; matrices are tiny)
    std::vector<Mat> kn(nn);
    for (std::size_t k = 0; k < nn; ++k)
        kn[k] = p.kernels[static_cast<std::size_t>(p.n - 1)](mesh.nodes[k], mesh.nodes[k]);

    // gamma(t) = -K_n^{-1}(t,t) F(xhat)(t) / t^nstar, extrapolated into t = 0
    GridFunction gamma = GridFunction::zero(mesh, p.m);
    for (std::size_t k = 1; k < nn; ++k) {
        const double t = std::max(mesh.nodes[k], cfg.t_min);
        const Vec f = residual_f_numeric(p, xh, t);
        gamma.values[k] = -1.0 * lu_solve(kn[k], f);
        for (double& v : gamma.values[k]) v /= std::pow(t, cfg.nstar);
    }
    if (nn >= 3)
        gamma.values[0] = 2.0 * gamma.values[1] - gamma.values[2];

    const bool no_integral = dt_kernels_vanish(p);

    auto apply_step = [&](const GridFunction& u) {
        std::vector<Vec> next(nn);
        for (std::size_t k = 0; k < nn; ++k) {
            const double t = mesh.nodes[k];
            Vec acc(static_cast<std::size_t>(p.m), 0.0);
            // functional shift term L u
            for (int i = 0; i + 1 < p.n; ++i) {
                const double ai = (k == 0) ? 0.0 : alpha_eval(p, i, t);
                const double ratio = (k == 0) ? alpha_dt_eval(p, i, 0.0) : ai / t;
                const Mat jump = p.kernels[static_cast<std::size_t>(i)](t, ai) -
                                 p.kernels[static_cast<std::size_t>(i + 1)](t, ai);
                const Vec ua = interp_eval(u, ai);
                const Vec term = jump * ua;
                const double w = alpha_dt_eval(p, i, t) * std::pow(ratio, cfg.nstar);
                for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += w * term[c];
            }
            // integral term K u
            if (!no_integral && k > 0) {
                auto damped = [&](double s) {
                    Vec us = interp_eval(u, s);
                    const double w = std::pow(s / t, cfg.nstar);
                    for (double& v : us) v *= w;
                    return us;
                };
                const Vec integral = piecewise_integral(p, t, damped, KernelSlice::DtKernel);
                for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += integral[c];
            }
            const Vec lifted = lu_solve(kn[k], acc);
            next[k] = gamma.values[k] - lifted;
        }
        return next;
    };

    double l = cfg.weight_l;
    for (;;) {
        PicardSolution sol;
        sol.xhat = xhat;
        sol.params = params;
        sol.config = cfg;
        sol.config.weight_l = l;

        GridFunction u = gamma;
        bool diverged = false;
        int grow_streak = 0;
        double prev_diff = -1.0;
        for (int iter = 1; iter <= cfg.max_iter; ++iter) {
            std::vector<Vec> next = apply_step(u);
            std::vector<Vec> diff(nn);
            for (std::size_t k = 0; k < nn; ++k) diff[k] = next[k] - u.values[k];
            // the weighted norm carries the contraction certificate; stopping
            // is decided in the sup norm so the far end of [0, T'] is not
            // hidden by the weight
            const double d = weighted_norm(u, diff, l);
            const double d_sup = weighted_norm(u, diff, 0.0);
            sol.iteration_history.push_back(d);
            u.values = std::move(next);
            const double unorm = weighted_norm(u, u.values, 0.0);
            if (d_sup <= cfg.tol * std::max(1.0, unorm)) {
                sol.u = std::move(u);
                return sol;
            }
            grow_streak = (prev_diff >= 0.0 && d > prev_diff) ? grow_streak + 1 : 0;
            prev_diff = d;
            if (grow_streak >= 5) {
                diverged = true;
                break;
            }
        }
        if (!diverged)
            throw Diverged("solve_residual: no convergence within max_iter iterations");
        // the integral operator contracts only for a large enough weight
        l = (l == 0.0) ? 1.0 / cfg.T_prime : 2.0 * l;
        if (l > 1024.0 / cfg.T_prime)
            throw Diverged("solve_residual: iteration diverges for every weight up to 2^10/T'");
    }
}

Vec assemble_solution(const PicardSolution& sol, double t) {
    if (t <= 0.0 || t > sol.config.T_prime * (1.0 + 1e-12))
        throw OutOfRange("assemble_solution: t outside (0, T']");
    Vec x = lp_eval(sol.xhat, t, sol.params);
    const Vec u = interp_eval(sol.u, t);
    const double w = std::pow(t, sol.config.nstar);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += w * u[k];
    return x;
}

}  // namespace volterra
