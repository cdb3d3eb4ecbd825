#include "volterra/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "volterra/grid.hpp"

namespace volterra {

namespace {

using TSeries = std::vector<double>;

TSeries alpha_powers_series(const std::vector<double>& alpha, int power, int maxdeg) {
    TSeries r(static_cast<std::size_t>(maxdeg) + 1, 0.0);
    r[0] = 1.0;
    TSeries a(static_cast<std::size_t>(maxdeg) + 1, 0.0);
    for (std::size_t nu = 1; nu < alpha.size() && nu <= static_cast<std::size_t>(maxdeg); ++nu)
        a[nu] = alpha[nu];
    for (int k = 0; k < power; ++k) {
        TSeries next(static_cast<std::size_t>(maxdeg) + 1, 0.0);
        for (int i = 0; i <= maxdeg; ++i) {
            if (r[static_cast<std::size_t>(i)] == 0.0) continue;
            for (int j = 1; i + j <= maxdeg; ++j)
                next[static_cast<std::size_t>(i + j)] +=
                    r[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)];
        }
        r = std::move(next);
    }
    return r;
}

/// Shift every t-power of x up by k (multiplication by t^k).
LogPowerPoly lp_shift(const LogPowerPoly& x, int k) {
    LogPowerPoly r(x.dim, x.max_degree);
    for (const std::string& n : x.param_names) r.register_param(n);
    for (const auto& [key, v] : x.terms) {
        if (key.first + k > x.max_degree) continue;
        r.add_term(key.first + k, key.second, v);
    }
    return r;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Solve B x = rhs columnwise (base and every parameter direction).
AffineVec solve_affine_regular(const Mat& b, const AffineVec& rhs) {
    AffineVec x(lu_solve(b, rhs.base));
    for (const auto& [name, col] : rhs.directions) x.directions.emplace(name, lu_solve(b, col));
    return x;
}

/// Columnwise consistent solve; columns below the noise floor of the level
/// (cancellation junk) map to zero.
AffineVec solve_affine_singular(const Mat& b, const NullspaceData& ns, const AffineVec& rhs,
                                double tol, double scale) {
    const double floor = 1e-12 * std::max(scale, 1.0);
    auto col_solve = [&](const Vec& col) -> Vec {
        if (norm_inf(col) <= floor) return Vec(col.size(), 0.0);
        return solve_singular_consistent(b, col, ns, tol).first;
    };
    AffineVec x(col_solve(rhs.base));
    for (const auto& [name, col] : rhs.directions) x.directions.emplace(name, col_solve(col));
    return x;
}

}  // namespace

LogPowerPoly residual_operator(const ProblemSpec&, const TaylorData& td,
                               const LogPowerPoly& x) {
    const int N = x.max_degree;
    if (td.N < N)
        throw DegreeMismatch("residual_operator: Taylor degree " + std::to_string(td.N) +
                             " below working degree " + std::to_string(N));
    if (x.dim != td.m) throw DimensionMismatch("residual_operator: dimension mismatch");

    LogPowerPoly f(td.m, N);

    // K_n(t,t) x(t)
    {
        std::map<int, Mat> diag_series;
        for (int k = 0; k <= N; ++k) {
            Mat a(td.m, td.m);
            for (int nu = 0; nu <= k; ++nu) a += td.kernel(td.n - 1, nu, k - nu);
            diag_series[k] = std::move(a);
        }
        f = lp_add(f, lp_matmul(diag_series, x));
    }

    // alpha_i'(t) {K_i - K_{i+1}}(t, alpha_i(t)) x(alpha_i(t))
    for (int i = 0; i + 1 < td.n; ++i) {
        const std::vector<double>& alpha = td.alpha_coeffs[static_cast<std::size_t>(i)];
        std::vector<TSeries> apow(static_cast<std::size_t>(N) + 1);
        for (int mu = 0; mu <= N; ++mu)
            apow[static_cast<std::size_t>(mu)] = alpha_powers_series(alpha, mu, N);

        // jump matrix along the curve as a t-series
        std::vector<Mat> jump(static_cast<std::size_t>(N) + 1, Mat(td.m, td.m));
        for (int k = 0; k <= N; ++k)
            for (int nu = 0; nu <= k; ++nu)
                for (int mu = 0; nu + mu <= N; ++mu) {
                    const double w = apow[static_cast<std::size_t>(mu)][static_cast<std::size_t>(k - nu)];
                    if (w == 0.0) continue;
                    jump[static_cast<std::size_t>(k)] +=
                        w * (td.kernel(i, nu, mu) - td.kernel(i + 1, nu, mu));
                }
        // multiply by alpha_i'(t)
        std::map<int, Mat> coef;
        for (int k = 0; k <= N; ++k) {
            Mat c(td.m, td.m);
            for (int d = 0; d <= k; ++d) {
                const std::size_t nu = static_cast<std::size_t>(d + 1);
                if (nu >= alpha.size()) continue;
                c += ((d + 1) * alpha[nu]) * jump[static_cast<std::size_t>(k - d)];
            }
            coef[k] = std::move(c);
        }
        f = lp_add(f, lp_matmul(coef, lp_compose_alpha(x, alpha)));
    }

    // integral terms: d/dt of each kernel piece against x
    for (int i = 0; i < td.n; ++i) {
        for (int k = 0; k + 1 <= N; ++k) {
            // s-polynomial (k+1) K_{i,k+1,mu} s^mu
            std::map<int, Mat> smat;
            bool any = false;
            for (int mu = 0; k + 1 + mu <= td.N; ++mu) {
                Mat c = (k + 1.0) * td.kernel(i, k + 1, mu);
                if (c.max_abs() > 0.0) any = true;
                smat[mu] = std::move(c);
            }
            if (!any) continue;
            const LogPowerPoly anti = lp_integrate(lp_matmul(smat, x));
            LogPowerPoly upper = (i + 1 == td.n)
                                     ? anti
                                     : lp_compose_alpha(anti, td.alpha_coeffs[static_cast<std::size_t>(i)]);
            if (i > 0) {
                upper = lp_sub(upper, lp_compose_alpha(
                                          anti, td.alpha_coeffs[static_cast<std::size_t>(i - 1)]));
            }
            f = lp_add(f, lp_shift(upper, k));
        }
    }

    // - f'(t)
    for (int nu = 1; nu <= N + 1 && nu <= td.N; ++nu) {
        Vec c = td.f_coeffs[static_cast<std::size_t>(nu)];
        if (nu - 1 > N) continue;
        f.add_term(nu - 1, 0, AffineVec(static_cast<double>(-nu) * c));
    }
    return f;
}

Vec solve_regular_level(const Mat& b_j, const Vec& rhs) { return lu_solve(b_j, rhs); }

namespace {

/// The shared level engine: solves the difference system for x_j(z) given the
/// classification. multiplicity = 0 means a regular point.
ZPoly solve_level(const DifferenceSystem& ds, int multiplicity, const NullspaceData& ns,
                  ParamFactory& params, std::vector<FreeParam>* provenance, int dim) {
    const int mu = multiplicity;
    const int r_hat = static_cast<int>(ns.right_basis.size());
    int d = -1;
    for (std::size_t q = 0; q < ds.rhs.size(); ++q)
        if (!ds.rhs[q].is_zero(0.0)) d = static_cast<int>(q);
    if (d < 0 && mu == 0) return {};  // zero forcing at a regular point
    const int D = std::max(d, 0) + mu;

    const Mat& b = ds.b_derivs[0];
    auto b_deriv = [&](int k) -> const Mat& { return ds.b_derivs[static_cast<std::size_t>(k)]; };

    double level_scale = 1.0;
    for (const AffineVec& v : ds.rhs) level_scale = std::max(level_scale, v.max_abs());

    ZPoly x(static_cast<std::size_t>(D) + 1, AffineVec(dim));
    std::vector<std::vector<AffScalar>> gamma(static_cast<std::size_t>(D) + 1);
    std::vector<bool> gamma_set(static_cast<std::size_t>(D) + 1, false);

    // coupling sum  sum_{p > q} C(p,q) B^{(p-q)} x_p, including only resolved
    // nullspace components (unresolved ones multiply vanishing derivatives)
    auto coupling = [&](int q) {
        AffineVec acc(dim);
        for (int p = q + 1; p <= D; ++p) {
            const double c = binom(p, q);
            AffineVec xp = x[static_cast<std::size_t>(p)];
            if (gamma_set[static_cast<std::size_t>(p)])
                for (int i = 0; i < r_hat; ++i)
                    xp = add_scaled(xp, gamma[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)],
                                    ns.right_basis[static_cast<std::size_t>(i)]);
            acc += c * (b_deriv(p - q) * xp);
        }
        return acc;
    };

    for (int q = D; q >= 0; --q) {
        AffineVec rhs_q(dim);
        if (q <= d) rhs_q = ds.rhs[static_cast<std::size_t>(q)];

        if (mu == 0) {
            AffineVec r = rhs_q - coupling(q);
            x[static_cast<std::size_t>(q)] = solve_affine_regular(b, r);
            continue;
        }

        // resolve the nullspace components of x_{q+mu} from the solvability
        // conditions of this equation
        const int pstar = q + mu;
        if (pstar <= D && !gamma_set[static_cast<std::size_t>(pstar)]) {
            const AffineVec r_tilde = rhs_q - coupling(q);
            Mat gram(r_hat, r_hat);
            for (int i = 0; i < r_hat; ++i) {
                const Vec bphi = b_deriv(mu) * ns.right_basis[static_cast<std::size_t>(i)];
                for (int l = 0; l < r_hat; ++l)
                    gram(l, i) = binom(pstar, q) * volterra::dot(bphi, ns.left_basis[static_cast<std::size_t>(l)]);
            }
            // projected right-hand side, one solve per affine column
            Vec proj_base(static_cast<std::size_t>(r_hat));
            std::map<std::string, Vec> proj_dirs;
            for (int l = 0; l < r_hat; ++l) {
                const AffScalar pl = dot(r_tilde, ns.left_basis[static_cast<std::size_t>(l)]);
                proj_base[static_cast<std::size_t>(l)] = pl.base;
                for (const auto& [name, v] : pl.dirs) {
                    auto it = proj_dirs.try_emplace(name, Vec(static_cast<std::size_t>(r_hat), 0.0)).first;
                    it->second[static_cast<std::size_t>(l)] = v;
                }
            }
            std::vector<AffScalar>& g = gamma[static_cast<std::size_t>(pstar)];
            g.assign(static_cast<std::size_t>(r_hat), AffScalar{});
            Vec gb;
            try {
                gb = lu_solve(gram, proj_base);
            } catch (const SingularMatrix&) {
                throw SolvabilityFailure("solve_singular_level: pairing system singular at j=" +
                                         std::to_string(ds.j));
            }
            for (int i = 0; i < r_hat; ++i) g[static_cast<std::size_t>(i)].base = gb[static_cast<std::size_t>(i)];
            for (const auto& [name, col] : proj_dirs) {
                const Vec gc = lu_solve(gram, col);
                for (int i = 0; i < r_hat; ++i)
                    g[static_cast<std::size_t>(i)].dirs[name] = gc[static_cast<std::size_t>(i)];
            }
            gamma_set[static_cast<std::size_t>(pstar)] = true;
        }

        AffineVec r = rhs_q - coupling(q);
        x[static_cast<std::size_t>(q)] = solve_affine_singular(b, ns, r, 1e-8, level_scale);
    }

    // fold the resolved nullspace components into the coefficients, grant the
    // unresolved ones fresh parameter names
    for (int q = 0; q <= D; ++q) {
        if (gamma_set[static_cast<std::size_t>(q)]) {
            for (int i = 0; i < r_hat; ++i)
                x[static_cast<std::size_t>(q)] =
                    add_scaled(x[static_cast<std::size_t>(q)],
                               gamma[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)],
                               ns.right_basis[static_cast<std::size_t>(i)]);
        } else if (mu > 0 && q < mu) {
            for (int i = 0; i < r_hat; ++i) {
                const std::string name = params.next();
                x[static_cast<std::size_t>(q)].directions[name] = ns.right_basis[static_cast<std::size_t>(i)];
                if (provenance) provenance->push_back({name, ds.j, i, q});
            }
        }
    }
    return x;
}

}  // namespace

ZPoly solve_singular_level(const DifferenceSystem& ds, int multiplicity, const NullspaceData& ns,
                           ParamFactory& params, std::vector<FreeParam>* provenance) {
    if (multiplicity < 1) throw Error("solve_singular_level: multiplicity must be >= 1");
    const int dim = ds.b_derivs[0].rows();
    return solve_level(ds, multiplicity, ns, params, provenance, dim);
}

AsymptoticResult build_asymptotics(const ProblemSpec& p, const TaylorData& td,
                                   const CharacteristicReport& report, int N) {
    if (td.N < N) throw DegreeMismatch("build_asymptotics: Taylor degree below N");
    if (static_cast<int>(report.points.size()) <= N)
        throw Error("build_asymptotics: classification does not cover 0..N");

    AsymptoticResult res;
    res.xhat = LogPowerPoly(td.m, N);
    ParamFactory params;

    for (int j = 0; j <= N; ++j) {
        const LogPowerPoly f = residual_operator(p, td, res.xhat);

        // forcing at level j, moved to the right-hand side
        ZPoly rhs;
        for (const auto& [key, v] : f.terms) {
            if (key.first != j) continue;
            if (static_cast<int>(rhs.size()) <= key.second)
                rhs.resize(static_cast<std::size_t>(key.second) + 1, AffineVec(td.m));
            rhs[static_cast<std::size_t>(key.second)] = -1.0 * v;
        }

        const CharacteristicPoint& pt = report.at(j);
        DifferenceSystem ds;
        ds.j = j;
        const int depth = static_cast<int>(rhs.size()) + pt.multiplicity + 1;
        for (int k = 0; k <= depth; ++k)
            ds.b_derivs.push_back(k == 0 ? pt.b : b_derivative(td, j, k));
        ds.rhs = std::move(rhs);

        const ZPoly xj = solve_level(ds, pt.multiplicity, pt.nullspace, params,
                                     &res.free_params, td.m);
        for (std::size_t q = 0; q < xj.size(); ++q)
            res.xhat.add_term(j, static_cast<int>(q), xj[q]);
    }

    // drop roundoff-level junk relative to the leading coefficients
    {
        double mx = 0.0;
        for (const auto& [key, v] : res.xhat.terms) mx = std::max(mx, v.max_abs());
        res.xhat.prune(1e-12 * std::max(mx, 1.0));
    }

    // the construction must cancel the symbolic residual through degree N
    {
        const LogPowerPoly f = residual_operator(p, td, res.xhat);
        double worst = 0.0;
        for (const auto& [key, v] : f.terms) worst = std::max(worst, v.max_abs());
        double scale = std::max(1.0, norm_inf(td.f_coeffs[1]));
        if (worst > 1e-7 * scale)
            throw SolvabilityFailure("build_asymptotics: residual coefficient " +
                                     std::to_string(worst) + " survives through degree N");
    }

    // honest residual order: evaluate F numerically with parameters at zero
    {
        std::map<std::string, double> bind;
        for (const FreeParam& fp : res.free_params) bind[fp.name] = 0.0;
        auto xeval = [&](double t) { return lp_eval(res.xhat, t, bind); };
        res.residual_order = residual_order_numeric(p, xeval);
    }
    return res;
}

}  // namespace volterra
