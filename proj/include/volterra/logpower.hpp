#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "volterra/linalg.hpp"

namespace volterra {

/// Vector-valued quantity affine in the free parameters:
/// base + sum_c c * directions[c].
struct AffineVec {
    Vec base;
    std::map<std::string, Vec> directions;

    explicit AffineVec(int dim = 0) : base(static_cast<std::size_t>(dim), 0.0) {}
    explicit AffineVec(Vec b) : base(std::move(b)) {}

    int dim() const { return static_cast<int>(base.size()); }
    bool is_zero(double eps = 0.0) const;
    double max_abs() const;

    AffineVec& operator+=(const AffineVec& o);
    AffineVec& operator-=(const AffineVec& o);
    AffineVec& operator*=(double c);
    friend AffineVec operator+(AffineVec a, const AffineVec& b) { return a += b; }
    friend AffineVec operator-(AffineVec a, const AffineVec& b) { return a -= b; }
    friend AffineVec operator*(double c, AffineVec a) { return a *= c; }
    friend AffineVec operator*(const Mat& m, const AffineVec& v);

    Vec eval(const std::map<std::string, double>& params) const;
    void prune(double eps = 0.0);
};

/// Scalar affine in the free parameters (used for solvability coefficients).
struct AffScalar {
    double base = 0.0;
    std::map<std::string, double> dirs;

    AffScalar() = default;
    explicit AffScalar(double b) : base(b) {}
    AffScalar& operator+=(const AffScalar& o);
    AffScalar& operator-=(const AffScalar& o);
    AffScalar& operator*=(double c);
    friend AffScalar operator*(double c, AffScalar a) { return a *= c; }
};

/// Inner product of an affine vector with a plain vector.
AffScalar dot(const AffineVec& a, const Vec& b);
/// a + c * v with an affine scalar c and plain direction v.
AffineVec add_scaled(AffineVec a, const AffScalar& c, const Vec& v);

/// Finite sum  x(t) = sum_{j,p} t^j (ln t)^p v_{jp}  with affine vector
/// coefficients; the representation of the asymptotic approximations near
/// t = 0. Terms above max_degree in t are dropped by every operation.
struct LogPowerPoly {
    int dim = 0;
    int max_degree = 0;
    std::map<std::pair<int, int>, AffineVec> terms;  // (j, p) -> coefficient
    std::vector<std::string> param_names;            // ordered

    LogPowerPoly() = default;
    LogPowerPoly(int dim, int max_degree) : dim(dim), max_degree(max_degree) {}

    /// Highest stored power of ln t.
    int max_ln_power() const;
    void add_term(int j, int p, const AffineVec& v);
    void register_param(const std::string& name);
    void prune(double eps = 0.0);
};

LogPowerPoly lp_add(const LogPowerPoly& a, const LogPowerPoly& b);
LogPowerPoly lp_sub(const LogPowerPoly& a, const LogPowerPoly& b);
LogPowerPoly lp_scale(const LogPowerPoly& a, double c);

/// Multiply by a matrix-coefficient polynomial in t: (sum_k t^k M_k) * x.
LogPowerPoly lp_matmul(const std::map<int, Mat>& m, const LogPowerPoly& x);

/// Substitute t <- alpha(t), alpha(t) = sum_{nu>=1} alpha[nu] t^nu with
/// alpha[1] in (0,1); ln t maps to ln t + ln alpha[1] + ln(1 + ...) expanded
/// as a power series. Throws DegenerateCurve when alpha[1] <= 0.
LogPowerPoly lp_compose_alpha(const LogPowerPoly& x, const std::vector<double>& alpha);

/// Termwise antiderivative vanishing at t = 0, using
/// int t^j ln^p t dt = t^{j+1} sum_s (-1)^s p!/(p-s)! / (j+1)^{s+1} ln^{p-s} t.
LogPowerPoly lp_integrate(const LogPowerPoly& x);

/// Numeric value at t > 0 with every free parameter bound.
Vec lp_eval(const LogPowerPoly& x, double t, const std::map<std::string, double>& params = {});

/// Canonical text form, e.g. "(-1.442695*ln t + c1)*e1 + 0.5*e2 + O(t^4)".
std::string lp_to_string(const LogPowerPoly& x);

}  // namespace volterra
