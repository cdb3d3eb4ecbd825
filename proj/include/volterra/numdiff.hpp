#pragma once

#include <functional>
#include <vector>

namespace volterra {

/// Finite-difference weights (Fornberg's algorithm): returns w such that
/// sum_i w[i] * f(nodes[i]) approximates the order-`deriv` derivative of f
/// at `z`, exact for polynomials of degree <= nodes.size() - 1.
std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int deriv);

/// Taylor coefficients g_0..g_N of a smooth scalar function around 0,
/// g_k = g^{(k)}(0) / k!. Central stencil by default; one_sided restricts all
/// evaluation points to [0, span].
std::vector<double> taylor_1d(const std::function<double(double)>& g, int N, double span,
                              bool one_sided = false);

/// 4th-order first derivative with fixed step h (the fallback used when a
/// problem supplies no analytic derivative). Shifts the stencil near the
/// boundary of [lo, hi].
double fd_derivative(const std::function<double(double)>& g, double x, double h, double lo,
                     double hi);

}  // namespace volterra
