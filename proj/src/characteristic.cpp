#include "volterra/characteristic.hpp"

#include <cmath>

namespace volterra {

std::string to_string(PointClass c) {
    switch (c) {
        case PointClass::Regular: return "regular";
        case PointClass::SimpleSingular: return "simple_singular";
        case PointClass::MultipleSingular: return "multiple_singular";
    }
    return "?";
}

Mat b_matrix(const TaylorData& td, int j) {
    Mat b = td.kernel(td.n - 1, 0, 0);
    for (int i = 0; i + 1 < td.n; ++i) {
        const double a1 = td.alpha1(i);
        b += std::pow(a1, 1 + j) * (td.kernel(i, 0, 0) - td.kernel(i + 1, 0, 0));
    }
    return b;
}

Mat b_derivative(const TaylorData& td, int j, int k) {
    Mat b(td.m, td.m);
    for (int i = 0; i + 1 < td.n; ++i) {
        const double a1 = td.alpha1(i);
        const double ai = std::log(a1);
        b += std::pow(a1, 1 + j) * std::pow(ai, k) * (td.kernel(i, 0, 0) - td.kernel(i + 1, 0, 0));
    }
    return b;
}

namespace {

/// Pairing matrix [(B^{(k)}(j) phi_i, psi_l)]; nonsingularity of this matrix
/// is what separates a multiplicity-k point from a deeper one.
Mat pairing(const Mat& bk, const NullspaceData& ns) {
    const int r = static_cast<int>(ns.right_basis.size());
    Mat g(r, r);
    for (int i = 0; i < r; ++i) {
        const Vec bphi = bk * ns.right_basis[static_cast<std::size_t>(i)];
        for (int l = 0; l < r; ++l)
            g(i, l) = dot(bphi, ns.left_basis[static_cast<std::size_t>(l)]);
    }
    return g;
}

}  // namespace

CharacteristicReport classify(const TaylorData& td, int jmax, double tol) {
    constexpr int kMaxMultiplicitySearch = 25;
    CharacteristicReport rep;
    for (int j = 0; j <= jmax; ++j) {
        CharacteristicPoint pt;
        pt.j = j;
        pt.b = b_matrix(td, j);
        pt.det_value = det(pt.b);
        pt.nullspace = rank_nullspace(pt.b, tol);
        pt.rank = pt.nullspace.rank;

        if (pt.rank == td.m) {
            pt.cls = PointClass::Regular;
            pt.multiplicity = 0;
        } else {
            // scale for the "zero matrix" test: B(j) itself can vanish for
            // exactly-cancelling data, so include the summand magnitudes
            double scale = pt.b.norm_frobenius();
            for (int i = 0; i + 1 < td.n; ++i)
                scale = std::max(scale, std::pow(td.alpha1(i), 1 + j) *
                                            (td.kernel(i, 0, 0) - td.kernel(i + 1, 0, 0)).norm_frobenius());
            scale = std::max(scale, td.kernel(td.n - 1, 0, 0).norm_frobenius());

            int kappa = 0;  // order of the first nonvanishing derivative
            for (int k = 1; k <= kMaxMultiplicitySearch + 1; ++k) {
                if (b_derivative(td, j, k).norm_frobenius() > tol * scale) {
                    kappa = k;
                    break;
                }
            }
            if (kappa == 0)
                throw UnclassifiablePoint("classify: derivatives of B vanish through order " +
                                          std::to_string(kMaxMultiplicitySearch + 1) + " at j=" +
                                          std::to_string(j));
            const Mat g = pairing(b_derivative(td, j, kappa), pt.nullspace);
            const int grank = rank_nullspace(g, tol).rank;
            if (grank != g.rows())
                throw UnclassifiablePoint(
                    "classify: singular pairing matrix at j=" + std::to_string(j) +
                    ", derivative order " + std::to_string(kappa));
            pt.cls = (kappa == 1) ? PointClass::SimpleSingular : PointClass::MultipleSingular;
            pt.multiplicity = kappa;
        }
        rep.points.push_back(std::move(pt));
    }
    for (const CharacteristicPoint& pt : rep.points)
        if (pt.multiplicity > 0) {
            ++rep.singular_count;
            rep.param_count += (td.m - pt.rank) * pt.multiplicity;
        }
    return rep;
}

}  // namespace volterra
