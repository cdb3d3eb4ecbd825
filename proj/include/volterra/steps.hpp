#pragma once

#include <vector>

#include "volterra/grid.hpp"
#include "volterra/problem.hpp"

namespace volterra {

/// Outcome of the uniqueness-condition check: q0 = |D(0)| with
/// D(t) = sum_i alpha_i K_n^{-1}(t,t) (K_i - K_{i+1})(t, alpha_1 t),
/// c = sup |K_n^{-1}(t,t) K(t,s)| over the triangle.
struct ConditionS {
    double q0 = 0.0;
    double c = 0.0;
    bool feasible = false;
};

struct StepsConfig {
    double q = 0.0;  // max |D(t)| on the first interval
    double c = 0.0;
    double h = 0.0;    // first-interval length
    double eps = 1.0;  // interval growth factor
    std::vector<std::pair<double, double>> intervals;
    double tol = 1e-12;
    int max_iter = 200;
};

struct StepsSolution {
    GridFunction x;
    std::vector<int> iterations;    // per interval
    std::vector<double> join_gaps;  // equation mismatch at interval starts
    StepsConfig config;
};

/// Requires linear curves alpha_i(t) = alpha_i t (throws NonlinearCurves
/// otherwise). Never throws on an infeasible problem: the flag reports it.
ConditionS check_condition_s(const ProblemSpec& p, const TaylorData& td);

/// Partition of [0, T] from the proof recipe: h1 with max |D| <= q on [0, h1],
/// h just below min{h1, (1-q)/c}, interval growth eps maximal in (0,1] with
/// alpha_{n-1} (1 + eps) <= 1. Throws Infeasible when the condition fails.
StepsConfig select_partition(const ProblemSpec& p, const TaylorData& td, double q_target = 0.5);

/// Method of steps: contraction iteration on [0, h], then second-kind solves
/// on each later interval where the shifted arguments land in solved history.
StepsSolution solve_steps(const ProblemSpec& p, const StepsConfig& cfg, int mesh_intervals = 1024);

}  // namespace volterra
