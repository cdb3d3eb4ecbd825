#pragma once

#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

using Vec = std::vector<double>;

/// Small dense real matrix, row-major. Everything here is sized for the
/// characteristic/asymptotic machinery (m on the order of a few, never large),
/// so plain unblocked algorithms are used throughout.
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), fill) {}

    static Mat identity(int n);
    static Mat diag(const Vec& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    Mat transpose() const;

    Mat& operator+=(const Mat& b);
    Mat& operator-=(const Mat& b);
    Mat& operator*=(double c);

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double c) { return a *= c; }
    friend Mat operator*(double c, Mat a) { return a *= c; }
    friend Mat operator*(const Mat& a, const Mat& b);
    friend Vec operator*(const Mat& a, const Vec& x);

    double norm_frobenius() const;
    double norm_inf() const;  // induced infinity norm (max absolute row sum)
    double max_abs() const;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

// Vec helpers.
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double c, Vec a);
double dot(const Vec& a, const Vec& b);
double norm_inf(const Vec& a);
double norm2(const Vec& a);
bool all_finite(const Vec& a);

/// Rank and orthonormal nullspace bases of A and its transpose.
struct NullspaceData {
    int rank = 0;
    std::vector<Vec> right_basis;  // basis of N(A)
    std::vector<Vec> left_basis;   // basis of N(A')
};

/// Relative pivot threshold used for every rank decision in the library.
inline constexpr double kRankTol = 1e-9;

/// Solve A x = b for square, numerically nonsingular A (partial-pivot LU).
/// Throws SingularMatrix when a pivot falls below tolerance.
Vec lu_solve(const Mat& a, const Vec& b);

/// det A via complete-pivoting elimination.
double det(const Mat& a);

/// Rank-revealing complete-pivoting elimination. Pivots with magnitude
/// <= tol * (largest pivot) count as zero. Bases come out orthonormal with a
/// deterministic sign convention (largest component positive).
NullspaceData rank_nullspace(const Mat& a, double tol = kRankTol);

/// Solve a consistent singular system: returns the minimal-norm particular
/// solution together with the right nullspace basis. Throws Inconsistent when
/// b has a component along the left nullspace above tolerance.
std::pair<Vec, std::vector<Vec>> solve_singular_consistent(const Mat& a, const Vec& b,
                                                           const NullspaceData& ns,
                                                           double tol = 1e-8);

}  // namespace volterra
