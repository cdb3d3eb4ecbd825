#pragma once

#include <map>
#include <string>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/logpower.hpp"
#include "volterra/problem.hpp"

namespace volterra {

/// Parameters of the residual contraction solve x(t) = xhat(t) + t^nstar u(t).
struct PicardConfig {
    int nstar = 0;
    double epsilon = 0.0;  // max of sup |alpha_i'| and sup alpha_i(t)/t on (0, T']
    double q = 0.0;        // measured damping bound, must stay < 1
    double T_prime = 1.0;
    double weight_l = 0.0;  // exponential weight of the norm max e^{-lt} |u(t)|
    int max_iter = 500;
    double tol = 1e-12;
    double t_min = 1e-8;
};

struct PicardSolution {
    LogPowerPoly xhat;
    std::map<std::string, double> params;
    GridFunction u;
    PicardConfig config;
    std::vector<double> iteration_history;  // weighted norms of successive differences
};

/// Choose the damping exponent: the smallest N* for which
/// eps^{N*} |K_n^{-1}(t,t)| sum_i |alpha_i'(t)| |K_i - K_{i+1}|(t, alpha_i(t))
/// stays below q_target on (0, T']. Throws NoContraction when eps >= 1 or
/// K_n(t,t) is singular at a sample.
PicardConfig select_nstar(const ProblemSpec& p, double T_prime, double q_target = 0.5);

/// Contraction iteration for the residual correction u. xhat must satisfy
/// |F(xhat)(t)| = o(t^N) with N >= nstar (checked numerically; throws
/// PreconditionResidual otherwise). Throws Diverged when no exponential
/// weight up to 2^10 / T' makes the iteration contract.
PicardSolution solve_residual(const ProblemSpec& p, const TaylorData& td,
                              const LogPowerPoly& xhat,
                              const std::map<std::string, double>& params,
                              const PicardConfig& cfg, int mesh_intervals = 2048);

/// x(t) = xhat(t) + t^nstar u(t) for t in (0, T'].
Vec assemble_solution(const PicardSolution& sol, double t);

}  // namespace volterra
