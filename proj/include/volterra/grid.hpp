#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "volterra/linalg.hpp"
#include "volterra/problem.hpp"

namespace volterra {

/// Strictly increasing 1-D mesh on [a, b].
struct Mesh {
    std::vector<double> nodes;

    static Mesh uniform(double a, double b, int intervals);

    double a() const { return nodes.front(); }
    double b() const { return nodes.back(); }
    std::size_t size() const { return nodes.size(); }
    /// Index of the interval containing t (clamped to the span).
    std::size_t locate(double t) const;
};

enum class InterpRule { Linear, Cubic };

/// Vector-valued function sampled on a mesh.
struct GridFunction {
    Mesh mesh;
    std::vector<Vec> values;  // one per node
    InterpRule interp = InterpRule::Linear;

    static GridFunction zero(Mesh m, int dim, InterpRule rule = InterpRule::Linear);
    static GridFunction sample(Mesh m, const std::function<Vec(double)>& f,
                               InterpRule rule = InterpRule::Linear);
    int dim() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
};

/// Piecewise-polynomial interpolation; throws OutOfRange outside the span.
Vec interp_eval(const GridFunction& g, double t);

enum class KernelSlice { Full, DtKernel };

struct QuadratureOptions {
    int subintervals_per_unit = 256;  // composite Simpson density away from 0
    int min_subintervals = 8;
    int graded_panel_subintervals = 64;  // per dyadic panel near s = 0
    double graded_cutoff = 1e-15;        // stop when a panel adds less than this (relative)
};

/// sum_i int_{alpha_{i-1}(t)}^{alpha_i(t)} K_i(t,s) g(s) ds (or dK_i/dt when
/// which = DtKernel). Segments never straddle a discontinuity curve; the
/// segment touching s = 0 is integrated on dyadically graded panels so that
/// integrable log singularities of g keep full accuracy.
Vec piecewise_integral(const ProblemSpec& p, double t, const std::function<Vec(double)>& g,
                       KernelSlice which, const QuadratureOptions& opt = {});

/// Same but integrating only over 0 <= s <= upper (upper <= t); used by the
/// method of steps for the history part of the integral term.
Vec piecewise_integral_upto(const ProblemSpec& p, double t, double upper,
                            const std::function<Vec(double)>& g, KernelSlice which,
                            const QuadratureOptions& opt = {});

/// The differentiated first-kind operator, evaluated numerically:
/// F(x)(t) = K_n(t,t) x(t) + sum_i alpha_i'(t) {K_i - K_{i+1}}(t, alpha_i(t))
///           x(alpha_i(t)) + sum_i int K_i^{(1)}(t,s) x(s) ds - f'(t).
Vec residual_f_numeric(const ProblemSpec& p, const std::function<Vec(double)>& x, double t,
                       const QuadratureOptions& opt = {});

/// Fitted slope of log |F(x)(t)| against log t on t = 2^-4 .. 2^-14. Samples
/// below the double-precision measurement floor are excluded; +infinity when
/// every sample sits below it (residual numerically zero).
double residual_order_numeric(const ProblemSpec& p, const std::function<Vec(double)>& x);

/// CSV: header "t,x1,...,xm", one row per node, 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& g);

}  // namespace volterra
