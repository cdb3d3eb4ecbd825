#pragma once

#include <string>
#include <vector>

#include "volterra/characteristic.hpp"
#include "volterra/logpower.hpp"
#include "volterra/problem.hpp"

namespace volterra {

/// Polynomial in z = ln t with affine vector coefficients; index = power of z.
using ZPoly = std::vector<AffineVec>;

/// Names free parameters c1, c2, ... in creation order.
struct ParamFactory {
    int counter = 0;
    std::string next() { return "c" + std::to_string(++counter); }
};

/// Provenance of one free parameter of the solution family.
struct FreeParam {
    std::string name;
    int j = 0;          // level that introduced it
    int direction = 0;  // index into the nullspace basis of B(j)
    int tier = 0;       // power of ln t it multiplies
};

/// One level of the coefficient recursion: the difference system
/// B-weighted combinations of x_j(z) and x_j(z + a_i) equal to rhs(z).
struct DifferenceSystem {
    int j = 0;
    std::vector<Mat> b_derivs;  // [0] = B(j), [k] = B^{(k)}(j)
    ZPoly rhs;
};

struct AsymptoticResult {
    LogPowerPoly xhat;
    std::vector<FreeParam> free_params;
    /// Fitted slope of log |F(xhat)(t)| against log t at t = 2^-4..2^-14;
    /// +infinity when the residual sits below the measurement floor.
    double residual_order = 0.0;
};

/// Symbolic F(x) assembled from the Taylor data: the differentiated
/// first-kind operator applied to a log-power polynomial, truncated at the
/// working degree of x. Throws DegreeMismatch when td.N < x.max_degree.
LogPowerPoly residual_operator(const ProblemSpec& p, const TaylorData& td,
                               const LogPowerPoly& x);

/// Regular level: solve B(j) x_j = rhs.
Vec solve_regular_level(const Mat& b_j, const Vec& rhs);

/// Singular level of multiplicity >= 1: resolves the leading tiers via the
/// solvability conditions with the pairing matrices of B^{(multiplicity)}(j);
/// unresolved nullspace components become fresh free parameters.
ZPoly solve_singular_level(const DifferenceSystem& ds, int multiplicity,
                           const NullspaceData& ns, ParamFactory& params,
                           std::vector<FreeParam>* provenance = nullptr);

/// Full construction of xhat(t) = sum_j x_j(ln t) t^j through degree N.
AsymptoticResult build_asymptotics(const ProblemSpec& p, const TaylorData& td,
                                   const CharacteristicReport& report, int N);

}  // namespace volterra
