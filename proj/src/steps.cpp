#include "volterra/steps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace volterra {

namespace {

Mat inverse(const Mat& a) {
    const int n = a.rows();
    Mat inv(n, n);
    for (int c = 0; c < n; ++c) {
        Vec e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(c)] = 1.0;
        const Vec col = lu_solve(a, e);
        for (int r = 0; r < n; ++r) inv(r, c) = col[static_cast<std::size_t>(r)];
    }
    return inv;
}

void require_linear_curves(const ProblemSpec& p) {
    for (int i = 0; i + 1 < p.n; ++i) {
        const double slope = alpha_dt_eval(p, i, 0.0);
        for (int k = 1; k <= 16; ++k) {
            const double t = p.T * k / 16.0;
            if (std::abs(alpha_eval(p, i, t) - slope * t) > 1e-10 * std::max(1.0, t))
                throw NonlinearCurves("steps: curve " + std::to_string(i + 1) +
                                      " is not linear; the method of steps requires alpha_i(t) = alpha_i t");
        }
    }
}

Mat d_matrix(const ProblemSpec& p, double t) {
    const double a1 = alpha_dt_eval(p, 0, 0.0);
    const Mat kn_inv = inverse(p.kernels[static_cast<std::size_t>(p.n - 1)](t, t));
    Mat d(p.m, p.m);
    for (int i = 0; i + 1 < p.n; ++i) {
        const double ai = alpha_dt_eval(p, i, 0.0);
        const Mat jump = p.kernels[static_cast<std::size_t>(i)](t, a1 * t) -
                         p.kernels[static_cast<std::size_t>(i + 1)](t, a1 * t);
        d += ai * (kn_inv * jump);
    }
    return d;
}

}  // namespace

ConditionS check_condition_s(const ProblemSpec& p, const TaylorData&) {
    require_linear_curves(p);
    ConditionS out;
    out.q0 = d_matrix(p, 0.0).norm_inf();

    // c = sup over the triangle of |K_n^{-1}(t,t) K(t,s)|, sampled 64x64
    double c = 0.0;
    bool finite = true;
    for (int a = 1; a <= 64; ++a) {
        const double t = p.T * a / 64.0;
        Mat kn_inv;
        try {
            kn_inv = inverse(p.kernels[static_cast<std::size_t>(p.n - 1)](t, t));
        } catch (const SingularMatrix&) {
            finite = false;
            break;
        }
        for (int b = 0; b <= 64; ++b) {
            const double s = t * b / 64.0;
            c = std::max(c, (kn_inv * kernel_eval(p, t, s)).norm_inf());
        }
    }
    out.c = c;
    out.feasible = finite && out.q0 < 1.0;
    return out;
}

StepsConfig select_partition(const ProblemSpec& p, const TaylorData& td, double q_target) {
    const ConditionS cond = check_condition_s(p, td);
    if (!cond.feasible)
        throw Infeasible("select_partition: condition (S) infeasible: |D(0)|=" +
                         std::to_string(cond.q0));

    StepsConfig cfg;
    cfg.c = cond.c;
    const double q_cap = std::max(q_target, 0.5 * (1.0 + cond.q0));

    // largest prefix of [0, T] on which |D| stays under the cap
    const int samples = 512;
    double h1 = p.T;
    bool capped = false;
    double q = cond.q0;
    for (int k = 0; k <= samples; ++k) {
        const double t = p.T * k / samples;
        const double dq = d_matrix(p, t).norm_inf();
        if (dq > q_cap) {
            h1 = p.T * (k - 1) / samples;
            capped = true;
            break;
        }
        q = std::max(q, dq);
    }
    if (h1 <= 0.0) throw Infeasible("select_partition: |D(t)| exceeds the cap immediately");
    cfg.q = q;

    const double budget = (1.0 - cfg.q) / std::max(cfg.c, 1e-300);
    const double h_raw = std::min(capped ? h1 : std::numeric_limits<double>::infinity(), budget);
    if (h_raw >= p.T) {
        cfg.h = p.T;
        cfg.intervals = {{0.0, p.T}};
    } else {
        cfg.h = 0.9 * h_raw;
        double top_slope = 0.0;
        for (int i = 0; i + 1 < p.n; ++i) top_slope = std::max(top_slope, alpha_dt_eval(p, i, 0.0));
        cfg.eps = (p.n == 1 || top_slope <= 0.5) ? 1.0 : std::min(1.0, 1.0 / top_slope - 1.0);
        double lo = 0.0, hi = cfg.h;
        for (;;) {
            cfg.intervals.push_back({lo, std::min(hi, p.T)});
            if (hi >= p.T) break;
            lo = hi;
            hi += cfg.eps * cfg.h;
        }
    }
    return cfg;
}

StepsSolution solve_steps(const ProblemSpec& p, const StepsConfig& cfg, int mesh_intervals) {
    require_linear_curves(p);
    if (cfg.intervals.empty()) throw Infeasible("solve_steps: empty partition");

    StepsSolution sol;
    sol.config = cfg;
    const double h_mesh = p.T / mesh_intervals;
    const bool no_integral = dt_kernels_vanish(p);

    auto f_bar = [&](double t) {
        return lu_solve(p.kernels[static_cast<std::size_t>(p.n - 1)](t, t), rhs_dt_eval(p, t));
    };

    GridFunction full;  // grows interval by interval
    full.interp = InterpRule::Linear;

    for (std::size_t iv = 0; iv < cfg.intervals.size(); ++iv) {
        const auto [lo, hi] = cfg.intervals[iv];
        const int nsub = std::max(2, static_cast<int>(std::ceil((hi - lo) / h_mesh)));
        const Mesh mesh = Mesh::uniform(lo, hi, nsub);
        const std::size_t nn = mesh.size();

        std::vector<Mat> kn_inv(nn);
        for (std::size_t k = 0; k < nn; ++k)
            kn_inv[k] = inverse(p.kernels[static_cast<std::size_t>(p.n - 1)](mesh.nodes[k], mesh.nodes[k]));

        // interval right-hand side: f_bar minus the shift and history terms
        std::vector<Vec> rhs(nn);
        for (std::size_t k = 0; k < nn; ++k) {
            const double t = mesh.nodes[k];
            Vec r = f_bar(t);
            if (iv > 0) {
                Vec acc(static_cast<std::size_t>(p.m), 0.0);
                for (int i = 0; i + 1 < p.n; ++i) {
                    const double ai = alpha_eval(p, i, t);
                    const Mat jump = p.kernels[static_cast<std::size_t>(i)](t, ai) -
                                     p.kernels[static_cast<std::size_t>(i + 1)](t, ai);
                    const Vec xa = interp_eval(full, ai);
                    const Vec term = jump * xa;
                    const double w = alpha_dt_eval(p, i, t);
                    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += w * term[c];
                }
                if (!no_integral) {
                    auto hist = [&](double s) { return interp_eval(full, s); };
                    const Vec integral =
                        piecewise_integral_upto(p, t, lo, hist, KernelSlice::DtKernel);
                    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += integral[c];
                }
                const Vec lifted = kn_inv[k] * acc;
                r = r - lifted;
            }
            rhs[k] = std::move(r);
        }

        GridFunction x;
        x.mesh = mesh;
        x.interp = InterpRule::Linear;
        x.values = rhs;

        int iters = 0;
        for (int iter = 1; iter <= cfg.max_iter; ++iter) {
            iters = iter;
            std::vector<Vec> next(nn);
            for (std::size_t k = 0; k < nn; ++k) {
                const double t = mesh.nodes[k];
                Vec acc(static_cast<std::size_t>(p.m), 0.0);
                if (iv == 0) {
                    // self-referencing shift term: alpha_i t stays inside [0, h]
                    for (int i = 0; i + 1 < p.n; ++i) {
                        const double ai = alpha_eval(p, i, t);
                        const Mat jump = p.kernels[static_cast<std::size_t>(i)](t, ai) -
                                         p.kernels[static_cast<std::size_t>(i + 1)](t, ai);
                        const Vec xa = interp_eval(x, ai);
                        const Vec term = jump * xa;
                        const double w = alpha_dt_eval(p, i, t);
                        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += w * term[c];
                    }
                    if (!no_integral) {
                        auto self = [&](double s) { return interp_eval(x, s); };
                        const Vec integral = piecewise_integral(p, t, self, KernelSlice::DtKernel);
                        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += integral[c];
                    }
                } else if (!no_integral && t > lo) {
                    // current-interval integral: s in (lo, t] lies in piece n
                    auto self = [&](double s) { return interp_eval(x, s); };
                    const int sub = std::max(4, static_cast<int>(std::ceil((t - lo) / h_mesh)) * 2);
                    const double step = (t - lo) / sub;
                    Vec integral(static_cast<std::size_t>(p.m), 0.0);
                    Vec fa = kernel_dt_eval(p, p.n - 1, t, lo) * self(lo);
                    for (int j = 0; j < sub; j += 2) {
                        const double sm = lo + (j + 1) * step;
                        const double sb = lo + (j + 2) * step;
                        const Vec fm = kernel_dt_eval(p, p.n - 1, t, sm) * self(sm);
                        const Vec fb = kernel_dt_eval(p, p.n - 1, t, sb) * self(sb);
                        for (std::size_t c = 0; c < integral.size(); ++c)
                            integral[c] += step / 3.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
                        fa = fb;
                    }
                    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += integral[c];
                }
                const Vec lifted = kn_inv[k] * acc;
                next[k] = rhs[k] - lifted;
            }
            double diff = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < nn; ++k) {
                diff = std::max(diff, norm_inf(next[k] - x.values[k]));
                scale = std::max(scale, norm_inf(next[k]));
            }
            x.values = std::move(next);
            if (diff <= cfg.tol * std::max(1.0, scale)) break;
            if (iter == cfg.max_iter)
                throw Diverged("solve_steps: no convergence on interval " + std::to_string(iv));
        }
        sol.iterations.push_back(iters);

        if (iv == 0) {
            full.mesh = x.mesh;
            full.values = x.values;
            sol.join_gaps.push_back(0.0);
        } else {
            // continuity across the join: the interval equation evaluated at
            // t = lo must reproduce the history value
            sol.join_gaps.push_back(norm_inf(x.values[0] - full.values.back()));
            x.values[0] = full.values.back();
            for (std::size_t k = 1; k < nn; ++k) {
                full.mesh.nodes.push_back(x.mesh.nodes[k]);
                full.values.push_back(x.values[k]);
            }
        }
    }
    sol.x = std::move(full);
    return sol;
}

}  // namespace volterra
