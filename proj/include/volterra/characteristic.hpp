#pragma once

#include <string>
#include <vector>

#include "volterra/linalg.hpp"
#include "volterra/problem.hpp"

namespace volterra {

enum class PointClass { Regular, SimpleSingular, MultipleSingular };

std::string to_string(PointClass c);

/// Classification of one integer point j of the characteristic matrix
/// B(j) = K_n(0,0) + sum_i (alpha_i'(0))^{1+j} (K_i(0,0) - K_{i+1}(0,0)).
struct CharacteristicPoint {
    int j = 0;
    Mat b;
    double det_value = 0.0;
    int rank = 0;
    NullspaceData nullspace;  // bases of N(B(j)) and N(B(j)')
    PointClass cls = PointClass::Regular;
    /// 0 for regular, 1 for simple singular, k+1 when the first k derivatives
    /// of B vanish at j.
    int multiplicity = 0;
};

struct CharacteristicReport {
    std::vector<CharacteristicPoint> points;  // j = 0..jmax
    int singular_count = 0;
    /// Predicted number of free parameters: sum over singular j of
    /// dim N(B(j)) * multiplicity.
    int param_count = 0;

    const CharacteristicPoint& at(int j) const { return points[static_cast<std::size_t>(j)]; }
};

/// The characteristic matrix B(j).
Mat b_matrix(const TaylorData& td, int j);

/// k-th derivative of B with respect to j:
/// sum_i (alpha_i'(0))^{1+j} (ln alpha_i'(0))^k (K_i(0,0) - K_{i+1}(0,0)).
Mat b_derivative(const TaylorData& td, int j, int k);

/// Classify every integer point 0..jmax as regular, simple singular or
/// multiple singular. Throws UnclassifiablePoint when a singular point fits
/// no definition within the multiplicity search bound (k <= 25).
CharacteristicReport classify(const TaylorData& td, int jmax, double tol = kRankTol);

}  // namespace volterra
