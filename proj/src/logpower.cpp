#include "volterra/logpower.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "volterra/errors.hpp"

namespace volterra {

bool AffineVec::is_zero(double eps) const {
    if (norm_inf(base) > eps) return false;
    for (const auto& [name, v] : directions)
        if (norm_inf(v) > eps) return false;
    return true;
}

double AffineVec::max_abs() const {
    double m = norm_inf(base);
    for (const auto& [name, v] : directions) m = std::max(m, norm_inf(v));
    return m;
}

AffineVec& AffineVec::operator+=(const AffineVec& o) {
    base = base + o.base;
    for (const auto& [name, v] : o.directions) {
        auto it = directions.find(name);
        if (it == directions.end())
            directions.emplace(name, v);
        else
            it->second = it->second + v;
    }
    return *this;
}

AffineVec& AffineVec::operator-=(const AffineVec& o) {
    base = base - o.base;
    for (const auto& [name, v] : o.directions) {
        auto it = directions.find(name);
        if (it == directions.end())
            directions.emplace(name, -1.0 * v);
        else
            it->second = it->second - v;
    }
    return *this;
}

AffineVec& AffineVec::operator*=(double c) {
    for (double& x : base) x *= c;
    for (auto& [name, v] : directions)
        for (double& x : v) x *= c;
    return *this;
}

AffineVec operator*(const Mat& m, const AffineVec& v) {
    AffineVec r(m * v.base);
    for (const auto& [name, d] : v.directions) r.directions.emplace(name, m * d);
    return r;
}

Vec AffineVec::eval(const std::map<std::string, double>& params) const {
    Vec r = base;
    for (const auto& [name, v] : directions) {
        auto it = params.find(name);
        if (it == params.end()) throw UnboundParameter("parameter '" + name + "' not bound");
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += it->second * v[i];
    }
    return r;
}

void AffineVec::prune(double eps) {
    for (auto it = directions.begin(); it != directions.end();) {
        if (norm_inf(it->second) <= eps)
            it = directions.erase(it);
        else
            ++it;
    }
    if (eps > 0.0)
        for (double& x : base)
            if (std::abs(x) <= eps) x = 0.0;
}

AffScalar& AffScalar::operator+=(const AffScalar& o) {
    base += o.base;
    for (const auto& [name, v] : o.dirs) dirs[name] += v;
    return *this;
}

AffScalar& AffScalar::operator-=(const AffScalar& o) {
    base -= o.base;
    for (const auto& [name, v] : o.dirs) dirs[name] -= v;
    return *this;
}

AffScalar& AffScalar::operator*=(double c) {
    base *= c;
    for (auto& [name, v] : dirs) v *= c;
    return *this;
}

AffScalar dot(const AffineVec& a, const Vec& b) {
    AffScalar r(volterra::dot(a.base, b));
    for (const auto& [name, v] : a.directions) r.dirs[name] = volterra::dot(v, b);
    return r;
}

AffineVec add_scaled(AffineVec a, const AffScalar& c, const Vec& v) {
    for (std::size_t i = 0; i < a.base.size(); ++i) a.base[i] += c.base * v[i];
    for (const auto& [name, coef] : c.dirs) {
        auto it = a.directions.find(name);
        if (it == a.directions.end())
            a.directions.emplace(name, coef * v);
        else
            for (std::size_t i = 0; i < v.size(); ++i) it->second[i] += coef * v[i];
    }
    return a;
}

int LogPowerPoly::max_ln_power() const {
    int p = 0;
    for (const auto& [key, v] : terms) p = std::max(p, key.second);
    return p;
}

void LogPowerPoly::register_param(const std::string& name) {
    if (std::find(param_names.begin(), param_names.end(), name) == param_names.end())
        param_names.push_back(name);
}

void LogPowerPoly::add_term(int j, int p, const AffineVec& v) {
    if (j > max_degree) return;
    if (v.dim() != dim) throw DimensionMismatch("LogPowerPoly: coefficient dimension mismatch");
    auto it = terms.find({j, p});
    if (it == terms.end())
        it = terms.emplace(std::make_pair(j, p), v).first;
    else
        it->second += v;
    for (const auto& [name, d] : v.directions) register_param(name);
    if (it->second.is_zero()) terms.erase(it);
}

void LogPowerPoly::prune(double eps) {
    for (auto it = terms.begin(); it != terms.end();) {
        it->second.prune(eps);
        if (it->second.is_zero(eps))
            it = terms.erase(it);
        else
            ++it;
    }
}

namespace {

void merge_params(LogPowerPoly& dst, const LogPowerPoly& src) {
    for (const std::string& n : src.param_names) dst.register_param(n);
}

}  // namespace

LogPowerPoly lp_add(const LogPowerPoly& a, const LogPowerPoly& b) {
    if (a.dim != b.dim) throw DimensionMismatch("lp_add: dimension mismatch");
    LogPowerPoly r(a.dim, std::max(a.max_degree, b.max_degree));
    merge_params(r, a);
    merge_params(r, b);
    for (const auto& [key, v] : a.terms) r.add_term(key.first, key.second, v);
    for (const auto& [key, v] : b.terms) r.add_term(key.first, key.second, v);
    return r;
}

LogPowerPoly lp_sub(const LogPowerPoly& a, const LogPowerPoly& b) {
    return lp_add(a, lp_scale(b, -1.0));
}

LogPowerPoly lp_scale(const LogPowerPoly& a, double c) {
    LogPowerPoly r(a.dim, a.max_degree);
    merge_params(r, a);
    if (c == 0.0) return r;
    for (const auto& [key, v] : a.terms) r.add_term(key.first, key.second, c * v);
    return r;
}

LogPowerPoly lp_matmul(const std::map<int, Mat>& m, const LogPowerPoly& x) {
    int out_dim = x.dim;
    if (!m.empty()) out_dim = m.begin()->second.rows();
    LogPowerPoly r(out_dim, x.max_degree);
    merge_params(r, x);
    for (const auto& [k, mk] : m) {
        if (mk.cols() != x.dim) throw DimensionMismatch("lp_matmul: matrix/operand mismatch");
        for (const auto& [key, v] : x.terms) {
            if (key.first + k > x.max_degree) continue;
            r.add_term(key.first + k, key.second, mk * v);
        }
    }
    return r;
}

namespace {

using TSeries = std::vector<double>;  // index = power of t

TSeries mul_tseries(const TSeries& a, const TSeries& b, int maxdeg) {
    TSeries c(static_cast<std::size_t>(maxdeg) + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(maxdeg); ++j)
            c[i + j] += a[i] * b[j];
    }
    return c;
}

// map (t-power, ln-power) -> coefficient; scalar log-power series
using LSeries = std::map<std::pair<int, int>, double>;

}  // namespace

LogPowerPoly lp_compose_alpha(const LogPowerPoly& x, const std::vector<double>& alpha) {
    const int maxdeg = x.max_degree;
    const double a1 = alpha.size() > 1 ? alpha[1] : 0.0;
    if (a1 <= 0.0) throw DegenerateCurve("lp_compose_alpha: alpha'(0) must be positive");

    // alpha(t) as a t-series
    TSeries at(static_cast<std::size_t>(maxdeg) + 1, 0.0);
    for (std::size_t nu = 1; nu < alpha.size() && nu <= static_cast<std::size_t>(maxdeg); ++nu)
        at[nu] = alpha[nu];

    // powers of alpha(t)
    std::vector<TSeries> pow_alpha(static_cast<std::size_t>(maxdeg) + 1);
    pow_alpha[0] = TSeries(static_cast<std::size_t>(maxdeg) + 1, 0.0);
    pow_alpha[0][0] = 1.0;
    for (int k = 1; k <= maxdeg; ++k)
        pow_alpha[static_cast<std::size_t>(k)] =
            mul_tseries(pow_alpha[static_cast<std::size_t>(k - 1)], at, maxdeg);

    // lambda(t) = ln(1 + w(t)), w = sum_{nu>=2} (alpha_nu/alpha_1) t^{nu-1}
    TSeries w(static_cast<std::size_t>(maxdeg) + 1, 0.0);
    for (std::size_t nu = 2; nu < alpha.size() && nu - 1 <= static_cast<std::size_t>(maxdeg); ++nu)
        w[nu - 1] = alpha[nu] / a1;
    TSeries lambda(static_cast<std::size_t>(maxdeg) + 1, 0.0);
    {
        TSeries wk = w;
        for (int k = 1; k <= maxdeg; ++k) {
            const double sgn = (k % 2 == 1) ? 1.0 : -1.0;
            for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] += sgn / k * wk[i];
            wk = mul_tseries(wk, w, maxdeg);
        }
    }
    const double a_log = std::log(a1);

    // powers of (ln t + a_log + lambda(t))
    const int pmax = x.max_ln_power();
    std::vector<LSeries> lnpow(static_cast<std::size_t>(pmax) + 1);
    lnpow[0][{0, 0}] = 1.0;
    for (int p = 1; p <= pmax; ++p) {
        LSeries next;
        for (const auto& [key, c] : lnpow[static_cast<std::size_t>(p - 1)]) {
            const auto [j, l] = key;
            next[{j, l + 1}] += c;          // * ln t
            next[{j, l}] += c * a_log;      // * a
            for (int nu = 1; j + nu <= maxdeg; ++nu)
                if (lambda[static_cast<std::size_t>(nu)] != 0.0)
                    next[{j + nu, l}] += c * lambda[static_cast<std::size_t>(nu)];
        }
        lnpow[static_cast<std::size_t>(p)] = std::move(next);
    }

    LogPowerPoly r(x.dim, maxdeg);
    merge_params(r, x);
    for (const auto& [key, v] : x.terms) {
        const auto [j, p] = key;
        const TSeries& pj = pow_alpha[static_cast<std::size_t>(j)];
        for (const auto& [lk, lc] : lnpow[static_cast<std::size_t>(p)]) {
            const auto [j2, l] = lk;
            for (int j1 = 0; j1 + j2 <= maxdeg; ++j1) {
                const double c = pj[static_cast<std::size_t>(j1)] * lc;
                if (c == 0.0) continue;
                r.add_term(j1 + j2, l, c * v);
            }
        }
    }
    return r;
}

LogPowerPoly lp_integrate(const LogPowerPoly& x) {
    LogPowerPoly r(x.dim, x.max_degree);
    merge_params(r, x);
    for (const auto& [key, v] : x.terms) {
        const auto [j, p] = key;
        if (j + 1 > x.max_degree) continue;
        double falling = 1.0;  // p (p-1) ... (p-s+1)
        double inv_pow = 1.0 / (j + 1);
        double sign = 1.0;
        for (int s = 0; s <= p; ++s) {
            r.add_term(j + 1, p - s, (sign * falling * inv_pow) * v);
            falling *= (p - s);
            inv_pow /= (j + 1);
            sign = -sign;
        }
    }
    return r;
}

Vec lp_eval(const LogPowerPoly& x, double t, const std::map<std::string, double>& params) {
    if (t <= 0.0) throw OutOfRange("lp_eval: t must be positive");
    Vec r(static_cast<std::size_t>(x.dim), 0.0);
    const double lt = std::log(t);
    for (const auto& [key, v] : x.terms) {
        const auto [j, p] = key;
        const double w = std::pow(t, j) * std::pow(lt, p);
        const Vec vv = v.eval(params);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += w * vv[i];
    }
    return r;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(7);
    os << v;
    return os.str();
}

/// One scalar monomial "c*t^j*ln^p t[*param]" with the sign folded into the
/// separator.
void append_monomial(std::ostringstream& os, bool& first, double c, int j, int p,
                     const std::string& param) {
    if (c == 0.0) return;
    const double mag = std::abs(c);
    const bool skip_coef = (mag == 1.0 && (j > 0 || p > 0 || !param.empty()));
    std::vector<std::string> factors;
    if (!skip_coef) factors.push_back(fmt(mag));
    if (j > 0) factors.push_back(j == 1 ? "t" : "t^" + std::to_string(j));
    if (p > 0) factors.push_back(p == 1 ? "ln t" : "ln^" + std::to_string(p) + " t");
    if (!param.empty()) factors.push_back(param);
    if (factors.empty()) factors.push_back(fmt(mag));
    std::string body;
    for (std::size_t i = 0; i < factors.size(); ++i) body += (i ? "*" : "") + factors[i];

    if (first) {
        if (c < 0.0) os << '-';
        first = false;
    } else {
        os << (c < 0.0 ? " - " : " + ");
    }
    os << body;
}

}  // namespace

std::string lp_to_string(const LogPowerPoly& x) {
    // terms ordered by increasing power of t, decreasing power of ln t
    std::vector<std::pair<int, int>> keys;
    for (const auto& [key, v] : x.terms) keys.push_back(key);
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second > b.second;
    });

    std::ostringstream os;
    os << "x(t) = ";
    bool any = false;
    for (int comp = 0; comp < x.dim; ++comp) {
        std::ostringstream part;
        bool first = true;
        for (const auto& [j, p] : keys) {
            const AffineVec& v = x.terms.at({j, p});
            append_monomial(part, first, v.base[static_cast<std::size_t>(comp)], j, p, "");
            for (const std::string& name : x.param_names) {
                auto it = v.directions.find(name);
                if (it != v.directions.end())
                    append_monomial(part, first, it->second[static_cast<std::size_t>(comp)], j, p,
                                    name);
            }
        }
        if (first) continue;  // component identically zero
        if (any) os << " + ";
        if (x.dim == 1)
            os << part.str();
        else {
            const std::string s = part.str();
            const bool needs_parens = s.find(' ') != std::string::npos;
            os << (needs_parens ? "(" + s + ")" : s) << "*e" << comp + 1;
        }
        any = true;
    }
    if (!any) os << "0";
    os << " + O(t^" << x.max_degree + 1 << ")";
    return os.str();
}

}  // namespace volterra
