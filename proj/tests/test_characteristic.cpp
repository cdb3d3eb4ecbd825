#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "volterra/characteristic.hpp"

using namespace volterra;

namespace {

const double kLn2 = std::log(2.0);

Mat scal(double v) {
    Mat m(1, 1);
    m(0, 0) = v;
    return m;
}

/// Scalar two-piece data: kernels k1, k2 constant, curve slope a1, f = t.
TaylorData scalar_two_piece(double k1, double k2, double a1, int N = 3) {
    TaylorData td = TaylorData::zeros(N, 1, 2);
    td.kernel(0, 0, 0) = scal(k1);
    td.kernel(1, 0, 0) = scal(k2);
    td.alpha_coeffs[0][1] = a1;
    td.f_coeffs[1] = Vec{1.0};
    return td;
}

TaylorData p_reg_data(int N = 3) { return scalar_two_piece(1.0, 2.0, 0.5, N); }
TaylorData p_sing_data(int N = 3) { return scalar_two_piece(-1.0, 1.0, 0.5, N); }

TaylorData p_mat_data(int N = 3) {
    TaylorData td = TaylorData::zeros(N, 2, 2);
    td.kernel(0, 0, 0) = Mat::diag({1.0, 3.0});
    td.kernel(1, 0, 0) = Mat::diag({-1.0, 1.0});
    td.alpha_coeffs[0][1] = 0.5;
    td.f_coeffs[1] = Vec{1.0, 1.0};
    return td;
}

/// Three pieces tuned so that B(j) = (1 - 2^{-j})^2: j = 0 is a double root
/// of the characteristic equation with B(0) = 0 and B'(0) = 0 exactly.
TaylorData double_root_data(int N = 3) {
    TaylorData td = TaylorData::zeros(N, 1, 3);
    td.kernel(0, 0, 0) = scal(1.0);
    td.kernel(1, 0, 0) = scal(-3.0);
    td.kernel(2, 0, 0) = scal(1.0);
    td.alpha_coeffs[0][1] = 0.25;
    td.alpha_coeffs[1][1] = 0.5;
    td.f_coeffs[1] = Vec{1.0};
    return td;
}

}  // namespace

TEST_CASE("characteristic matrix values") {
    TaylorData reg = p_reg_data();
    CHECK(b_matrix(reg, 0)(0, 0) == doctest::Approx(1.5));
    CHECK(b_matrix(reg, 1)(0, 0) == doctest::Approx(1.75));

    TaylorData sing = p_sing_data();
    for (int j = 0; j <= 3; ++j)
        CHECK(b_matrix(sing, j)(0, 0) == doctest::Approx(1.0 - std::pow(2.0, -j)));

    TaylorData mat = p_mat_data();
    Mat b0 = b_matrix(mat, 0);
    CHECK(b0(0, 0) == doctest::Approx(0.0));
    CHECK(b0(1, 1) == doctest::Approx(2.0));
    CHECK(b0(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("characteristic matrix derivatives") {
    // scalar singular case: B'(0) = (1/2) ln(1/2) (K1 - K2) = ln 2
    CHECK(b_derivative(p_sing_data(), 0, 1)(0, 0) == doctest::Approx(kLn2));

    // matrix case: B'(0) = (1/2) ln(1/2) (2 E) = -ln 2 * E
    Mat d1 = b_derivative(p_mat_data(), 0, 1);
    CHECK(d1(0, 0) == doctest::Approx(-kLn2));
    CHECK(d1(1, 1) == doctest::Approx(-kLn2));
    CHECK(d1(0, 1) == doctest::Approx(0.0));

    // single kernel piece: empty sum
    TaylorData one = TaylorData::zeros(2, 1, 1);
    one.kernel(0, 0, 0) = scal(5.0);
    CHECK(b_derivative(one, 0, 1).norm_frobenius() == doctest::Approx(0.0));
}

TEST_CASE("classification of the reference problems") {
    SUBCASE("all points regular") {
        CharacteristicReport rep = classify(p_reg_data(), 6);
        for (const auto& pt : rep.points) {
            CHECK(pt.cls == PointClass::Regular);
            CHECK(pt.rank == 1);
        }
        CHECK(rep.singular_count == 0);
        CHECK(rep.param_count == 0);
    }
    SUBCASE("scalar simple singular point at j=0") {
        CharacteristicReport rep = classify(p_sing_data(), 3);
        CHECK(rep.at(0).cls == PointClass::SimpleSingular);
        CHECK(rep.at(0).multiplicity == 1);
        CHECK(rep.at(0).rank == 0);
        CHECK(rep.at(0).nullspace.right_basis.size() == 1);
        for (int j = 1; j <= 3; ++j) CHECK(rep.at(j).cls == PointClass::Regular);
        CHECK(rep.param_count == 1);
        // pairing value behind the simple-singular verdict is ln 2
        const Vec phi = rep.at(0).nullspace.right_basis[0];
        const Vec psi = rep.at(0).nullspace.left_basis[0];
        CHECK(dot(b_derivative(p_sing_data(), 0, 1) * phi, psi) == doctest::Approx(kLn2));
    }
    SUBCASE("matrix simple singular point with rank 1") {
        CharacteristicReport rep = classify(p_mat_data(), 3);
        CHECK(rep.at(0).cls == PointClass::SimpleSingular);
        CHECK(rep.at(0).rank == 1);
        CHECK(rep.at(0).multiplicity == 1);
        CHECK(rep.param_count == 1);
        for (int j = 1; j <= 3; ++j) CHECK(rep.at(j).cls == PointClass::Regular);
    }
}

TEST_CASE("double root classified as 2-multiple singular point") {
    TaylorData td = double_root_data();
    CHECK(b_matrix(td, 0)(0, 0) == doctest::Approx(0.0));
    CHECK(std::abs(b_derivative(td, 0, 1)(0, 0)) < 1e-14);
    CHECK(b_derivative(td, 0, 2)(0, 0) == doctest::Approx(2.0 * kLn2 * kLn2));

    CharacteristicReport rep = classify(td, 3);
    CHECK(rep.at(0).cls == PointClass::MultipleSingular);
    CHECK(rep.at(0).multiplicity == 2);
    CHECK(rep.param_count == 2);
    for (int j = 1; j <= 3; ++j) CHECK(rep.at(j).cls == PointClass::Regular);
}

TEST_CASE("single-piece kernels: regular or unclassifiable") {
    TaylorData ok = TaylorData::zeros(2, 1, 1);
    ok.kernel(0, 0, 0) = scal(2.0);
    CharacteristicReport rep = classify(ok, 4);
    for (const auto& pt : rep.points) {
        CHECK(pt.cls == PointClass::Regular);
        CHECK(pt.b(0, 0) == doctest::Approx(2.0));
    }

    TaylorData bad = TaylorData::zeros(2, 1, 1);  // K1(0,0) = 0, all derivatives vanish
    CHECK_THROWS_AS(classify(bad, 2), UnclassifiablePoint);
}

TEST_CASE("determinant column of the report") {
    CharacteristicReport rep = classify(p_mat_data(), 2);
    CHECK(rep.at(0).det_value == doctest::Approx(0.0));
    CHECK(rep.at(1).det_value == doctest::Approx(-0.75));  // det diag(-1/2, 3/2)
    CHECK(rep.at(2).det_value == doctest::Approx(-0.9375));
}
