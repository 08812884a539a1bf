#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "ratlin/linalg.hpp"

using namespace ratlin;

TEST_CASE("smallest singular pair of simple matrices") {
    const auto id = smallest_right_singular_vector(RMat::Identity(2, 2));
    CHECK(id.sigma == doctest::Approx(1.0));
    CHECK(id.v.norm() == doctest::Approx(1.0));

    RMat D = RMat::Zero(3, 2);
    D(0, 0) = 3;
    D(1, 1) = 0.5;
    const auto sp = smallest_right_singular_vector(D);
    CHECK(sp.sigma == doctest::Approx(0.5));
    CHECK(std::abs(sp.v(0)) < 1e-15);
    CHECK(std::abs(std::abs(sp.v(1)) - 1.0) < 1e-15);

    CHECK_THROWS_AS(smallest_right_singular_vector(RMat(0, 0)), DimensionError);
    CHECK_THROWS_AS(smallest_right_singular_vector(RMat::Ones(2, 3)), DimensionError);
}

TEST_CASE("smallest singular pair matches a one-sided Jacobi oracle") {
    for (unsigned seed : {7u, 8u, 21u}) {
        const RMat M = oracle::random_matrix(10, 4, seed);
        const auto sp = smallest_right_singular_vector(M);
        const auto sv = oracle::jacobi_singular_values(M);
        CHECK(std::abs(sp.sigma - sv.back()) <= 1e-12 * sv.front());
        CHECK(std::abs(sp.v.norm() - 1.0) < 1e-14);
        CHECK(std::abs((M * sp.v).norm() - sp.sigma) <= 1e-12 * M.norm());
        CHECK((M * sp.v - sp.sigma * sp.u).norm() <= 1e-12 * M.norm());
    }
}

TEST_CASE("pencil eigenvalues") {
    RMat C0 = -RMat(RVec::LinSpaced(2, 1, 2).asDiagonal());
    auto sp = pencil_eigenvalues(C0, RMat::Identity(2, 2));
    CHECK(oracle::match_distance(sp.finite, {1.0, 2.0}) < 1e-14);
    CHECK(sp.infinite == 0);

    RMat R(2, 2);
    R << 0, 1, -1, 0;
    sp = pencil_eigenvalues(R, RMat::Identity(2, 2));
    CHECK(oracle::match_distance(sp.finite, {cplx(0, 1), cplx(0, -1)}) < 1e-14);

    // singular C1 gives an infinite eigenvalue
    RMat C1 = RMat::Zero(2, 2);
    C1(0, 0) = 1;
    sp = pencil_eigenvalues(-RMat::Identity(2, 2), C1);
    CHECK(sp.infinite == 1);
    REQUIRE(sp.finite.size() == 1);
    CHECK(std::abs(sp.finite[0] - 1.0) < 1e-14);

    CHECK_THROWS_AS(pencil_eigenvalues(RMat::Zero(2, 2), RMat::Zero(2, 2)), RegularityError);
    CHECK_THROWS_AS(pencil_eigenvalues(RMat::Zero(2, 2), RMat::Zero(3, 3)), DimensionError);
}

TEST_CASE("pencil eigenvalues agree with the standard problem and are conjugate closed") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const RMat C0 = oracle::random_matrix(8, 8, seed);
        const RMat C1 = oracle::random_matrix(8, 8, seed + 50) + 3 * RMat::Identity(8, 8);
        const auto sp = pencil_eigenvalues(C0, C1);
        REQUIRE(sp.finite.size() == 8);
        Eigen::EigenSolver<RMat> es(RMat(-C1.inverse() * C0));
        std::vector<cplx> ref(es.eigenvalues().data(), es.eigenvalues().data() + 8);
        CHECK(oracle::match_distance(sp.finite, ref) < 1e-10);
        std::vector<cplx> conj;
        for (cplx z : sp.finite) conj.push_back(std::conj(z));
        CHECK(oracle::match_distance(sp.finite, conj) < 1e-10);
    }
}

TEST_CASE("least squares") {
    const RVec b = RVec::LinSpaced(4, 1, 4);
    auto r = least_squares_solve(RMat::Identity(4, 4), b);
    CHECK((r.x - b).norm() == doctest::Approx(0.0));
    CHECK(r.residual < 1e-15);
    CHECK_FALSE(r.rank_deficient);

    const RMat M = oracle::random_matrix(12, 3, 4);
    const RVec x0 = RVec::LinSpaced(3, -1, 2);
    r = least_squares_solve(M, M * x0);
    CHECK((r.x - x0).norm() < 1e-12);
    CHECK(r.residual <= 1e-12 * (M * x0).norm());

    const RMat A = oracle::random_matrix(20, 5, 3);
    const RVec rhs = oracle::random_matrix(20, 1, 33).col(0);
    r = least_squares_solve(A, rhs);
    const oracle::LMat Al = A.cast<long double>();
    const oracle::LVec xl = (Al.transpose() * Al).ldlt().solve(Al.transpose() * rhs.cast<long double>());
    CHECK((r.x - xl.cast<double>()).norm() <= 1e-9 * xl.cast<double>().norm());
    CHECK(r.cond > 1.0);

    RMat D = RMat::Zero(3, 2);
    D(0, 0) = 1;
    D(1, 0) = 1;
    RVec y(3);
    y << 1, 1, 1;
    r = least_squares_solve(D, y);
    CHECK(r.rank_deficient);
    CHECK(r.x(1) == 0.0);
    CHECK(r.x(0) == doctest::Approx(1.0));
}

TEST_CASE("dense LU") {
    CHECK((dense_lu_solve(RMat(RMat::Identity(3, 3)), RVec(RVec::Ones(3))) - RVec::Ones(3)).norm() == 0.0);
    RMat M(2, 2);
    M << 2, 0, 0, 4;
    RVec b(2);
    b << 2, 4;
    CHECK((dense_lu_solve(M, b) - RVec::Ones(2)).norm() < 1e-15);

    const CMat C = oracle::random_complex_matrix(30, 30, 11);
    const CVec rhs = oracle::random_complex_matrix(30, 1, 12).col(0);
    const CVec x = dense_lu_solve(C, rhs);
    CHECK((C * x - rhs).norm() <= 1e-10 * C.norm() * x.norm());

    CHECK_THROWS_AS(dense_lu_solve(RMat::Zero(2, 2), b), SingularError);
    RMat S(2, 2);
    S << 1, 2, 2, 4;
    CHECK_THROWS_AS(dense_lu_solve(S, b), SingularError);
}

TEST_CASE("complex smallest singular value") {
    const CMat C = oracle::random_complex_matrix(6, 6, 5);
    Eigen::JacobiSVD<CMat> ref(C);
    CHECK(smallest_singular_value(C) == doctest::Approx(ref.singularValues()(5)).epsilon(1e-12));
}
