#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "volterra/linalg.hpp"

namespace volterra {

using ScalarFn = std::function<double(double)>;
using VecFn = std::function<Vec(double)>;
using MatFn = std::function<Mat(double, double)>;

/// Taylor data of an equation instance around t = 0: kernel coefficients
/// K_{i,nu,mu} (coefficient of t^nu s^mu in piece i), right-hand side
/// coefficients f_nu and curve coefficients alpha_{i,nu}, all through total
/// degree N. Order-0 kernel terms are included: the characteristic matrix
/// needs K_i(0,0).
struct TaylorData {
    int N = 0;
    int m = 1;
    int n = 1;
    std::vector<std::vector<Mat>> kernel_coeffs;    // [piece][nu*(N+1)+mu]
    std::vector<Vec> f_coeffs;                      // [nu], nu=0..N, f_0 = 0
    std::vector<std::vector<double>> alpha_coeffs;  // [curve][nu], nu=0..N, [0]=0

    const Mat& kernel(int piece, int nu, int mu) const {
        return kernel_coeffs[static_cast<std::size_t>(piece)]
                            [static_cast<std::size_t>(nu * (N + 1) + mu)];
    }
    Mat& kernel(int piece, int nu, int mu) {
        return kernel_coeffs[static_cast<std::size_t>(piece)]
                            [static_cast<std::size_t>(nu * (N + 1) + mu)];
    }
    /// alpha_i'(0) for curve i (0-based)
    double alpha1(int curve) const { return alpha_coeffs[static_cast<std::size_t>(curve)][1]; }

    static TaylorData zeros(int N, int m, int n);
};

/// A first-kind Volterra equation instance with piecewise kernel:
/// integral_0^t K(t,s) x(s) ds = f(t), where K jumps across s = alpha_i(t).
/// Piece i applies on alpha_{i-1}(t) < s <= alpha_i(t) (alpha_0 = 0,
/// alpha_n(t) = t).
struct ProblemSpec {
    std::string name;
    int m = 1;
    int n = 1;
    double T = 1.0;
    std::vector<MatFn> kernels;      // n pieces
    std::vector<MatFn> kernel_dt;    // d/dt of each piece; empty => finite differences
    std::vector<ScalarFn> alphas;    // n-1 curves
    std::vector<ScalarFn> alpha_dt;  // empty => finite differences
    VecFn rhs;
    VecFn rhs_dt;                    // empty => finite differences
    std::optional<TaylorData> taylor;
    /// true when evaluators are defined only on 0 <= s <= t <= T (e.g. the
    /// right-hand side of a manufactured problem); numeric differentiation
    /// then keeps its stencils one-sided.
    bool one_sided_evaluators = false;
};

struct ValidationReport {
    struct Check {
        std::string name;
        bool pass = false;
        double value = 0.0;  // measured quantity backing the verdict
    };
    std::vector<Check> checks;
    bool all_pass() const;
};

/// Check the standing hypotheses (f(0)=0, curve ordering at 0 and on (0,T],
/// nonsingular K_n(t,t)) at `samples` points. Failures are reported, never
/// thrown.
ValidationReport validate(const ProblemSpec& p, int samples);

/// K(t,s) with piece selection; s exactly on a curve belongs to the lower
/// piece. Throws OutOfDomain for s < 0 or s > t.
Mat kernel_eval(const ProblemSpec& p, double t, double s);

enum class TaylorMode { Supplied, Numeric };

/// Taylor data through total degree N, either passed through from the problem
/// (after invariant checks) or extracted numerically by high-order finite
/// differences.
TaylorData taylor_data(const ProblemSpec& p, int N, TaylorMode mode);

// Derivative accessors with the finite-difference fallback (4th-order
// stencils, step 1e-4 * max(1,T)).
Mat kernel_dt_eval(const ProblemSpec& p, int piece, double t, double s);
double alpha_dt_eval(const ProblemSpec& p, int curve, double t);
Vec rhs_dt_eval(const ProblemSpec& p, double t);
double alpha_eval(const ProblemSpec& p, int curve, double t);

/// true when every d/dt kernel slice vanishes identically (sampled), so the
/// integral term of the differentiated equation drops out exactly.
bool dt_kernels_vanish(const ProblemSpec& p);

}  // namespace volterra
