#include "volterra/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace volterra {

Mat Mat::identity(int n) {
    Mat e(n, n);
    for (int i = 0; i < n; ++i) e(i, i) = 1.0;
    return e;
}

Mat Mat::diag(const Vec& d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat& Mat::operator+=(const Mat& b) {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionMismatch("Mat +=: shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += b.a_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& b) {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionMismatch("Mat -=: shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= b.a_[k];
    return *this;
}

Mat& Mat::operator*=(double c) {
    for (double& v : a_) v *= c;
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("Mat *: shape mismatch");
    Mat c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec operator*(const Mat& a, const Vec& x) {
    if (a.cols_ != static_cast<int>(x.size())) throw DimensionMismatch("Mat * Vec: shape mismatch");
    Vec y(static_cast<std::size_t>(a.rows_), 0.0);
    for (int i = 0; i < a.rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols_; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

double Mat::norm_frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double Mat::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < rows_; ++i) {
        double row = 0.0;
        for (int j = 0; j < cols_; ++j) row += std::abs((*this)(i, j));
        best = std::max(best, row);
    }
    return best;
}

double Mat::max_abs() const {
    double best = 0.0;
    for (double v : a_) best = std::max(best, std::abs(v));
    return best;
}

Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("Vec +: size mismatch");
    Vec c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("Vec -: size mismatch");
    Vec c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

Vec operator*(double c, Vec a) {
    for (double& v : a) v *= c;
    return a;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(const Vec& a) {
    double best = 0.0;
    for (double v : a) best = std::max(best, std::abs(v));
    return best;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

bool all_finite(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Vec lu_solve(const Mat& a, const Vec& b) {
    if (!a.square()) throw DimensionMismatch("lu_solve: matrix not square");
    const int n = a.rows();
    if (static_cast<int>(b.size()) != n) throw DimensionMismatch("lu_solve: rhs size mismatch");

    Mat u = a;
    Vec y = b;
    const double scale = std::max(a.max_abs(), 1e-300);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(u(i, k)) > std::abs(u(piv, k))) piv = i;
        if (std::abs(u(piv, k)) <= 1e-13 * scale)
            throw SingularMatrix("lu_solve: pivot below tolerance");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(u(k, j), u(piv, j));
            std::swap(y[static_cast<std::size_t>(k)], y[static_cast<std::size_t>(piv)]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = u(i, k) / u(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) u(i, j) -= f * u(k, j);
            y[static_cast<std::size_t>(i)] -= f * y[static_cast<std::size_t>(k)];
        }
    }
    Vec x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= u(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / u(i, i);
    }
    return x;
}

namespace {

/// Complete-pivoting elimination, optionally carrying a right-hand side.
/// Pivots with magnitude <= tol * (first pivot) count as zero.
struct Elimination {
    Mat u;
    Vec y;                      // eliminated rhs (empty if none supplied)
    std::vector<int> col_perm;  // u column j <- original column col_perm[j]
    int rank = 0;
    int swaps = 0;

    Elimination(const Mat& a, double tol, const Vec* rhs = nullptr) : u(a) {
        const int r = a.rows(), c = a.cols();
        if (rhs) y = *rhs;
        col_perm.resize(static_cast<std::size_t>(c));
        std::iota(col_perm.begin(), col_perm.end(), 0);

        double first_pivot = 0.0;
        const int kmax = std::min(r, c);
        for (int k = 0; k < kmax; ++k) {
            int pi = k, pj = k;
            double best = 0.0;
            for (int i = k; i < r; ++i)
                for (int j = k; j < c; ++j)
                    if (std::abs(u(i, j)) > best) {
                        best = std::abs(u(i, j));
                        pi = i;
                        pj = j;
                    }
            if (k == 0) first_pivot = best;
            if (best == 0.0 || best <= tol * first_pivot) break;
            if (pi != k) {
                for (int j = 0; j < c; ++j) std::swap(u(k, j), u(pi, j));
                if (rhs) std::swap(y[static_cast<std::size_t>(k)], y[static_cast<std::size_t>(pi)]);
                ++swaps;
            }
            if (pj != k) {
                for (int i = 0; i < r; ++i) std::swap(u(i, k), u(i, pj));
                std::swap(col_perm[static_cast<std::size_t>(k)], col_perm[static_cast<std::size_t>(pj)]);
                ++swaps;
            }
            for (int i = k + 1; i < r; ++i) {
                const double f = u(i, k) / u(k, k);
                if (f == 0.0) continue;
                for (int j = k; j < c; ++j) u(i, j) -= f * u(k, j);
                if (rhs) y[static_cast<std::size_t>(i)] -= f * y[static_cast<std::size_t>(k)];
            }
            ++rank;
        }
    }

    /// Back-substitute an upper-triangular solve with the permuted unknowns
    /// in xp, writing the result in original variable order.
    Vec unpermute(const Vec& xp) const {
        Vec x(xp.size(), 0.0);
        for (std::size_t j = 0; j < xp.size(); ++j)
            x[static_cast<std::size_t>(col_perm[j])] = xp[j];
        return x;
    }

    /// Nullspace vector for free (permuted) column free_idx >= rank.
    Vec nullvector(int free_idx) const {
        Vec xp(static_cast<std::size_t>(u.cols()), 0.0);
        xp[static_cast<std::size_t>(free_idx)] = 1.0;
        for (int i = rank - 1; i >= 0; --i) {
            double s = -u(i, free_idx);
            for (int j = i + 1; j < rank; ++j) s -= u(i, j) * xp[static_cast<std::size_t>(j)];
            xp[static_cast<std::size_t>(i)] = s / u(i, i);
        }
        return unpermute(xp);
    }

    /// Particular solution with free variables set to zero (rhs must have been
    /// supplied at construction and be consistent).
    Vec particular() const {
        Vec xp(static_cast<std::size_t>(u.cols()), 0.0);
        for (int i = rank - 1; i >= 0; --i) {
            double s = y[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < rank; ++j) s -= u(i, j) * xp[static_cast<std::size_t>(j)];
            xp[static_cast<std::size_t>(i)] = s / u(i, i);
        }
        return unpermute(xp);
    }
};

void orthonormalize(std::vector<Vec>& basis) {
    std::vector<Vec> out;
    for (Vec v : basis) {
        for (const Vec& q : out) {
            const double c = dot(v, q);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
        }
        const double n = norm2(v);
        if (n > 1e-14) {
            for (double& x : v) x /= n;
            out.push_back(std::move(v));
        }
    }
    // deterministic sign: largest-magnitude component positive
    for (Vec& q : out) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < q.size(); ++i)
            if (std::abs(q[i]) > std::abs(q[arg])) arg = i;
        if (q[arg] < 0.0)
            for (double& x : q) x = -x;
    }
    basis = std::move(out);
}

}  // namespace

double det(const Mat& a) {
    if (!a.square()) throw DimensionMismatch("det: matrix not square");
    Elimination e(a, 0.0);
    if (e.rank < a.rows()) return 0.0;
    double d = (e.swaps % 2 == 0) ? 1.0 : -1.0;
    for (int k = 0; k < a.rows(); ++k) d *= e.u(k, k);
    return d;
}

NullspaceData rank_nullspace(const Mat& a, double tol) {
    if (tol <= 0.0) throw Error("rank_nullspace: tol must be positive");
    NullspaceData ns;
    Elimination e(a, tol);
    ns.rank = e.rank;
    for (int j = e.rank; j < a.cols(); ++j) ns.right_basis.push_back(e.nullvector(j));
    orthonormalize(ns.right_basis);

    Elimination et(a.transpose(), tol);
    for (int j = et.rank; j < a.rows(); ++j) ns.left_basis.push_back(et.nullvector(j));
    orthonormalize(ns.left_basis);
    return ns;
}

std::pair<Vec, std::vector<Vec>> solve_singular_consistent(const Mat& a, const Vec& b,
                                                           const NullspaceData& ns, double tol) {
    if (static_cast<int>(b.size()) != a.rows())
        throw DimensionMismatch("solve_singular_consistent: rhs size mismatch");
    const double bscale = std::max(norm2(b), 1e-300);
    for (const Vec& psi : ns.left_basis)
        if (std::abs(dot(b, psi)) > tol * bscale)
            throw Inconsistent("solve_singular_consistent: rhs component on left nullspace = " +
                               std::to_string(dot(b, psi)));

    Elimination e(a, kRankTol, &b);
    Vec x = e.particular();
    // minimal-norm representative: drop the right-nullspace components
    for (const Vec& phi : ns.right_basis) {
        const double c = dot(x, phi);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * phi[i];
    }
    return {x, ns.right_basis};
}

}  // namespace volterra
