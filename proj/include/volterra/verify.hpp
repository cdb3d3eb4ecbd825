#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "volterra/characteristic.hpp"
#include "volterra/grid.hpp"
#include "volterra/problem.hpp"

namespace volterra {

/// Solution family evaluator: (t, parameter bindings) -> value.
using ClosedForm = std::function<Vec(double, const std::map<std::string, double>&)>;

struct ExpectedPoint {
    int j = 0;
    PointClass cls = PointClass::SimpleSingular;
    int rank = 0;
    int multiplicity = 1;
};

/// Built-in problem with known analysis, shared by tests, docs and the CLI.
struct CatalogEntry {
    std::string name;
    ProblemSpec problem;
    ClosedForm closed_form;                     // empty when no closed form is known
    std::vector<std::string> closed_form_params;
    std::vector<ExpectedPoint> expected_singular;  // remaining points are regular
    int expected_param_count = 0;
};

/// Entries: P_reg (constant solution 2/3), P_sing (family log2 t + c),
/// P_mat (the symmetric-matrix example with family (-log2 t + c1, 1/2)),
/// P_man (manufactured solution 1 + t), P_conv (convolution kernels,
/// uniqueness regime, no closed form). Throws UnknownName otherwise.
CatalogEntry catalog(const std::string& name);

std::vector<std::string> catalog_names();

/// Max over the samples of ||int_0^t K x ds - f(t)|| / max(1, ||f(t)||).
double firstkind_residual(const ProblemSpec& p, const std::function<Vec(double)>& x,
                          const std::vector<double>& t_samples, const QuadratureOptions& opt = {});

/// Build a problem whose exact solution is xstar: keeps the kernels and curves
/// of the skeleton and replaces f by the quadrature of the first-kind operator
/// applied to xstar (density `quad_subintervals_per_unit`).
ProblemSpec manufacture(const ProblemSpec& skeleton, const std::function<Vec(double)>& xstar,
                        int quad_subintervals_per_unit);

/// Least-squares slope of log err versus log h. Throws DegenerateFit when any
/// error is nonpositive, fewer than 3 points are given, or h is not strictly
/// decreasing.
double convergence_order(const std::vector<std::pair<double, double>>& errors);

}  // namespace volterra
