#include "volterra/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace volterra {

Mesh Mesh::uniform(double a, double b, int intervals) {
    Mesh m;
    m.nodes.reserve(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k)
        m.nodes.push_back(a + (b - a) * k / intervals);
    m.nodes.back() = b;
    return m;
}

std::size_t Mesh::locate(double t) const {
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - nodes.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, nodes.size() - 2);
}

GridFunction GridFunction::zero(Mesh m, int dim, InterpRule rule) {
    GridFunction g;
    g.values.assign(m.size(), Vec(static_cast<std::size_t>(dim), 0.0));
    g.mesh = std::move(m);
    g.interp = rule;
    return g;
}

GridFunction GridFunction::sample(Mesh m, const std::function<Vec(double)>& f, InterpRule rule) {
    GridFunction g;
    g.values.reserve(m.size());
    for (double t : m.nodes) g.values.push_back(f(t));
    g.mesh = std::move(m);
    g.interp = rule;
    return g;
}

Vec interp_eval(const GridFunction& g, double t) {
    const auto& nodes = g.mesh.nodes;
    const double span_tol = 1e-12 * std::max(1.0, std::abs(nodes.back()));
    if (t < nodes.front() - span_tol || t > nodes.back() + span_tol)
        throw OutOfRange("interp_eval: t outside the mesh span");
    t = std::clamp(t, nodes.front(), nodes.back());

    const std::size_t i = g.mesh.locate(t);
    if (g.interp == InterpRule::Linear) {
        const double h = nodes[i + 1] - nodes[i];
        const double w = (t - nodes[i]) / h;
        Vec r(g.values[i].size());
        for (std::size_t k = 0; k < r.size(); ++k)
            r[k] = (1.0 - w) * g.values[i][k] + w * g.values[i + 1][k];
        return r;
    }

    // cubic: 4-point Lagrange on the neighboring nodes
    const std::size_t n = nodes.size();
    std::size_t lo = (i == 0) ? 0 : i - 1;
    if (lo + 3 >= n) lo = n - 4;
    if (n < 4) lo = 0;
    const std::size_t count = std::min<std::size_t>(4, n);
    Vec r(g.values[0].size(), 0.0);
    for (std::size_t a = 0; a < count; ++a) {
        double w = 1.0;
        for (std::size_t b = 0; b < count; ++b) {
            if (a == b) continue;
            w *= (t - nodes[lo + b]) / (nodes[lo + a] - nodes[lo + b]);
        }
        for (std::size_t k = 0; k < r.size(); ++k) r[k] += w * g.values[lo + a][k];
    }
    return r;
}

namespace {

using Integrand = std::function<Vec(double)>;

/// Composite Simpson over [a, b] with the given number of subintervals
/// (rounded up to even).
Vec simpson(const Integrand& f, double a, double b, int subintervals, int dim) {
    if (subintervals % 2 != 0) ++subintervals;
    const double h = (b - a) / subintervals;
    Vec acc(static_cast<std::size_t>(dim), 0.0);
    Vec fa = f(a);
    for (int k = 0; k < subintervals; k += 2) {
        const Vec fm = f(a + (k + 1) * h);
        const Vec fb = (k + 2 == subintervals) ? f(b) : f(a + (k + 2) * h);
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += h / 3.0 * (fa[i] + 4.0 * fm[i] + fb[i]);
        fa = fb;
    }
    return acc;
}

/// Integral over [0, b] on dyadic panels [b/2^{k+1}, b/2^k]; descends until a
/// panel's contribution is negligible. Handles integrands with an integrable
/// logarithmic singularity at 0 without order loss.
Vec graded_integral(const Integrand& f, double b, int dim, const QuadratureOptions& opt) {
    Vec acc(static_cast<std::size_t>(dim), 0.0);
    if (b <= 0.0) return acc;
    double hi = b;
    double total_scale = 0.0;
    for (int panel = 0; panel < 1100; ++panel) {
        const double lo = hi / 2.0;
        const Vec part = simpson(f, lo, hi, opt.graded_panel_subintervals, dim);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += part[i];
        total_scale = std::max(total_scale, norm_inf(acc));
        if (norm_inf(part) <= opt.graded_cutoff * std::max(total_scale, 1e-30)) break;
        if (lo < 1e-300) break;
        hi = lo;
    }
    return acc;
}

int segment_subintervals(double lo, double hi, const QuadratureOptions& opt) {
    const double len = hi - lo;
    int n = static_cast<int>(std::ceil(len * opt.subintervals_per_unit));
    // integrands may behave like ln s: derivatives grow as 1/lo^4 near 0, so
    // keep the subinterval width a fixed fraction of lo
    if (lo > 0.0) {
        const double rel = std::min(64.0 * len / lo, 4096.0);
        n = std::max(n, static_cast<int>(std::ceil(rel)));
    }
    return std::max(opt.min_subintervals, n);
}

}  // namespace

Vec piecewise_integral_upto(const ProblemSpec& p, double t, double upper, const Integrand& g,
                            KernelSlice which, const QuadratureOptions& opt) {
    if (t < 0.0 || t > p.T * (1.0 + 1e-12))
        throw OutOfDomain("piecewise_integral: t outside [0, T]");
    Vec acc(static_cast<std::size_t>(p.m), 0.0);
    if (t == 0.0 || upper <= 0.0) return acc;
    upper = std::min(upper, t);

    double lo = 0.0;
    for (int i = 0; i < p.n; ++i) {
        const double hi_full = (i + 1 < p.n) ? alpha_eval(p, i, t) : t;
        const double hi = std::min(hi_full, upper);
        if (hi > lo) {
            auto integrand = [&](double s) -> Vec {
                const Mat k = (which == KernelSlice::Full) ? p.kernels[static_cast<std::size_t>(i)](t, s)
                                                           : kernel_dt_eval(p, i, t, s);
                return k * g(s);
            };
            Vec part;
            if (i == 0)
                part = graded_integral(integrand, hi, p.m, opt);
            else
                part = simpson(integrand, lo, hi, segment_subintervals(lo, hi, opt), p.m);
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += part[k];
        }
        if (hi_full >= upper) break;
        lo = hi_full;
    }
    return acc;
}

Vec piecewise_integral(const ProblemSpec& p, double t, const Integrand& g, KernelSlice which,
                       const QuadratureOptions& opt) {
    return piecewise_integral_upto(p, t, t, g, which, opt);
}

Vec residual_f_numeric(const ProblemSpec& p, const Integrand& x, double t,
                       const QuadratureOptions& opt) {
    Vec f = p.kernels[static_cast<std::size_t>(p.n - 1)](t, t) * x(t);
    for (int i = 0; i + 1 < p.n; ++i) {
        const double ai = alpha_eval(p, i, t);
        const double dai = alpha_dt_eval(p, i, t);
        const Mat jump = p.kernels[static_cast<std::size_t>(i)](t, ai) -
                         p.kernels[static_cast<std::size_t>(i + 1)](t, ai);
        const Vec xa = x(ai);
        const Vec contrib = jump * xa;
        for (std::size_t k = 0; k < f.size(); ++k) f[k] += dai * contrib[k];
    }
    const Vec integral = piecewise_integral(p, t, x, KernelSlice::DtKernel, opt);
    const Vec fp = rhs_dt_eval(p, t);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += integral[k] - fp[k];
    return f;
}

double residual_order_numeric(const ProblemSpec& p, const std::function<Vec(double)>& x) {
    const double floor = 1e-13 * std::max(1.0, norm_inf(rhs_dt_eval(p, 1e-3)));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = 4; k <= 14; ++k) {
        const double t = std::pow(2.0, -k);
        const double r = norm_inf(residual_f_numeric(p, x, t));
        if (r <= floor) continue;
        const double xv = std::log(t), yv = std::log(r);
        sx += xv;
        sy += yv;
        sxx += xv * xv;
        sxy += xv * yv;
        ++n;
    }
    if (n < 3) return std::numeric_limits<double>::infinity();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_csv(std::ostream& os, const GridFunction& g) {
    os << "t";
    for (int k = 1; k <= g.dim(); ++k) os << ",x" << k;
    os << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < g.mesh.size(); ++i) {
        os << g.mesh.nodes[i];
        for (double v : g.values[i]) os << "," << v;
        os << "\n";
    }
}

}  // namespace volterra
