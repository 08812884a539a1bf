#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "instances.hpp"
#include "ratlin/errors.hpp"
#include "ratlin/matrix_market.hpp"

using namespace ratlin;

namespace {

const cplx I(0.0, 1.0);

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<cplx> sample_points(unsigned seed, int count) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-4, 4);
    std::vector<cplx> s;
    for (int i = 0; i < count; ++i) s.emplace_back(U(rng), U(rng));
    s.emplace_back(0.0, 1.5);
    s.emplace_back(0.7, 0.0);
    return s;
}

RMat eval_pencil(const RMat& L0, const RMat& L1, double s) { return L0 + s * L1; }

}  // namespace

TEST_CASE("realified barycentric pencil for two conjugate pairs") {
    const cplx s1(0.3, 1.2), s3(-0.2, 2.5);
    const cplx x1(0.8, -0.4), x3(-0.6, 0.9);
    const cplx r1(1.5, 0.25), r3(-0.7, 1.1);
    const std::vector<cplx> sigma{s1, std::conj(s1), s3, std::conj(s3)};
    const std::vector<cplx> xi{x1, std::conj(x1), x3, std::conj(x3)};
    const std::vector<std::vector<cplx>> vals{{r1, std::conj(r1), r3, std::conj(r3)}};
    const auto st = barycentric_stages(sigma, xi, vals);

    for (double s : {0.0, 1.0, -2.5, 3.75}) {
        RMat want = RMat::Zero(5, 5);
        want.row(0) << 0, r1.real(), r1.imag(), r3.real(), r3.imag();
        want.row(1) << -1, 1, 0, 1, 0;
        const cplx a = x3 * s1, b = x1 * s3, c = x3 * std::conj(s3);
        want.row(2) << 0, x3.real() * s - a.real(), x3.imag() * s - a.imag(), b.real() - x1.real() * s,
            b.imag() - x1.imag() * s;
        want.row(3) << 0, a.imag() - x3.imag() * s, x3.real() * s - a.real(), x1.imag() * s - b.imag(),
            b.real() - x1.real() * s;
        want.row(4) << 0, 0, 0, c.imag() - x3.imag() * s, c.real() - x3.real() * s;
        CHECK((eval_pencil(st.L3_0, st.L3_1, s) - want).norm() < 1e-13);
    }

    const auto lin = strong_barycentric_linearization(sigma, xi, vals);
    CHECK(lin.alpha0[0] == doctest::Approx(r3.real()));
    REQUIRE(lin.a[0].size() == 3);
    CHECK(lin.a[0](0) == doctest::Approx(r1.real() - r3.real()));
    CHECK(lin.a[0](1) == doctest::Approx(r1.imag()));
    CHECK(lin.a[0](2) == doctest::Approx(r3.imag()));
}

TEST_CASE("realification matches the complex pencil") {
    for (unsigned seed = 0; seed < 12; ++seed) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> U(-1, 1);
        const int R = seed % 3, P = 1 + seed % 3;
        std::vector<cplx> sigma, xi;
        std::vector<std::vector<cplx>> vals(2);
        for (int i = 0; i < R; ++i) {
            sigma.emplace_back(0.5 * (i + 1), 0.0);
            xi.emplace_back(U(rng));
            for (auto& v : vals) v.emplace_back(U(rng));
        }
        for (int p = 0; p < P; ++p) {
            const cplx z(U(rng), 1 + p + 0.5 * U(rng)), w(U(rng), U(rng));
            sigma.insert(sigma.end(), {z, std::conj(z)});
            xi.insert(xi.end(), {w, std::conj(w)});
            for (auto& v : vals) {
                const cplx g(U(rng), U(rng));
                v.insert(v.end(), {g, std::conj(g)});
            }
        }
        const auto st = barycentric_stages(sigma, xi, vals);
        const int rows = static_cast<int>(st.L2_0.rows());
        for (cplx s : sample_points(seed, 3)) {
            // Kernel vector of L2(s): [1; phi(s) / sum phi(s)] gives zero in rows m..end
            // and the function values in rows 0..m-1.
            const int d = static_cast<int>(sigma.size());
            CVec v(1 + d);
            cplx den = 0;
            for (int i = 0; i < d; ++i) den += xi[st.order[i]] / (s - sigma[st.order[i]]);
            v(0) = 1.0;
            for (int i = 0; i < d; ++i) v(1 + i) = xi[st.order[i]] / (s - sigma[st.order[i]]) / den;
            const CVec res = (st.L2_0 + s * st.L2_1) * v;
            CHECK(res.tail(rows - 2).norm() < 1e-12 * v.norm() * (1 + std::abs(s)));
            CHECK(std::abs(res(2)) < 1e-12);
            for (int j = 0; j < 2; ++j) {
                BarycentricApproximant b{sigma, xi, vals};
                CHECK(rel(res(j), eval_barycentric(b, j, s)) < 1e-12);
            }
        }
    }
}

TEST_CASE("inverse Newton pencil for poles 1, 2+3i, 2-3i") {
    RefitApproximant r;
    r.basis.kind = BasisKind::InverseNewton;
    r.basis.poles = {cplx(1, 0), cplx(2, 3), cplx(2, -3)};
    r.basis.xi = {1, 1, 1};
    r.gamma = {{0.0, 0.0, 0.0}};
    r.alpha0 = {0};
    r.alpha1 = {0};
    r.alpha2 = {0};
    const auto lin = linearize_refit(r);
    for (double s : {0.0, 0.5, -1.25}) {
        RMat L(3, 4);
        L.col(0) = lin.basis.c0 + s * lin.basis.c1;
        L.rightCols(3) = lin.basis.C0 + s * lin.basis.C1;
        RMat want(3, 4);
        want << 1, 1 - s, 0, 0, 0, 2, 2 - s, 3, 0, 0, -3, 2 - s;
        CHECK((L - want).norm() < 1e-15);
    }
    for (cplx s : sample_points(3, 5)) {
        const cplx q = (s - 1.0) * ((s - 2.0) * (s - 2.0) + 9.0);
        const CVec phi = dual_basis_phi(lin.basis, s);
        CHECK(rel(phi(0), 1.0 / (s - 1.0)) < 1e-13);
        CHECK(rel(phi(1), 2.0 * (s - 2.0) / q) < 1e-13);
        CHECK(rel(phi(2), -6.0 / q) < 1e-13);
    }
}

TEST_CASE("pole bases are reproduced by their dual bases") {
    const std::vector<cplx> poles{cplx(-1, 0), cplx(-0.5, 2), cplx(-0.5, -2), cplx(-3, 0), cplx(-0.2, 5),
                                  cplx(-0.2, -5)};
    const auto Z = log_imaginary_grid(0.01, 2.0, 40);
    for (auto kind : {BasisKind::PartialFraction, BasisKind::InverseNewton}) {
        RefitApproximant r;
        r.basis = make_pole_basis(poles, Z, kind);
        r.gamma = {std::vector<cplx>(poles.size(), 0.0)};
        r.alpha0 = r.alpha1 = r.alpha2 = {0};
        const auto lin = linearize_refit(r);
        for (cplx s : sample_points(5, 6)) {
            const CVec phi = basis_functions(r.basis, s);
            const CVec psi = dual_basis_phi(lin.basis, s);
            for (int i = 0; i < static_cast<int>(poles.size()); ++i) {
                const bool pair = r.basis.poles[i].imag() != 0;
                cplx want = phi(i);
                if (pair) {
                    want = phi(i) + phi(i + 1);
                    CHECK(std::abs(psi(i) - want) < 1e-12 * std::max(1.0, std::abs(want)));
                    want = I * (phi(i) - phi(i + 1));
                    ++i;
                }
                CHECK(std::abs(psi(i) - want) < 1e-12 * std::max(1.0, std::abs(want)));
            }
        }
    }
}

TEST_CASE("Schur complement equals the approximant") {
    for (unsigned seed = 1; seed <= 30; ++seed) {
        const auto in = inst::make(seed);
        CAPTURE(seed);
        CAPTURE(in.kind);
        for (cplx s : sample_points(seed, 8)) {
            bool near_pole = false;
            for (cplx p : in.poles) near_pole |= std::abs(s - p) < 1e-3;
            if (near_pole) continue;
            for (int j = 0; j < in.lin.m(); ++j) CHECK(rel(schur_complement_eval(in.lin, j, s), in.r(j, s)) < 1e-10);
        }
    }
}

TEST_CASE("dual bases have full rank including infinity") {
    for (unsigned seed = 1; seed <= 30; ++seed) {
        const auto in = inst::make(seed);
        CAPTURE(seed);
        auto samples = sample_points(seed, 4);
        samples.insert(samples.end(), in.poles.begin(), in.poles.end());
        const auto rep = dual_basis_rank(in.lin.basis, samples);
        CHECK(rep.full());
    }
}

TEST_CASE("multiplication by s") {
    for (unsigned seed = 1; seed <= 30; ++seed) {
        auto in = inst::make(seed);
        CAPTURE(seed);
        for (int j = 0; j < in.lin.m(); ++j) {
            if (in.lin.alpha2[j] != 0.0) {
                CHECK_THROWS_AS(multiply_by_s(in.lin, j), ConfigError);
                continue;
            }
            multiply_by_s(in.lin, j);
            for (cplx s : sample_points(seed + 100, 4))
                CHECK(rel(schur_complement_eval(in.lin, j, s), s * in.r(j, s)) < 1e-10);
        }
    }
    ScalarLinearization empty;
    empty.basis.c0 = empty.basis.c1 = RVec(0);
    empty.basis.C0 = empty.basis.C1 = RMat(0, 0);
    empty.a = {RVec(0)};
    empty.alpha0 = {2.0};
    empty.alpha1 = {3.0};
    empty.alpha2 = {0.0};
    multiply_by_s(empty, 0);
    CHECK(schur_complement_eval(empty, 0, cplx(2, 1)) == cplx(2, 1) * (2.0 + 3.0 * cplx(2, 1)));
    CHECK_THROWS_AS(multiply_by_s(empty, 0), ConfigError);
}

TEST_CASE("system pencil") {
    for (unsigned seed = 1; seed <= 15; ++seed) {
        const auto in = inst::make(seed);
        CAPTURE(seed);
        const auto P = assemble_system_pencil(in.sys, in.lin);
        REQUIRE(P.size() == in.sys.n * (2 + in.lin.dim()));
        const RMat A = P.dense_A(), E = P.dense_E();
        const RMat X = oracle::random_matrix(P.size(), 3, seed);
        for (int c = 0; c < 3; ++c) {
            CHECK((P.apply_A(X.col(c)) - A * X.col(c)).norm() < 1e-13 * A.norm() * X.col(c).norm());
            CHECK((P.apply_E(X.col(c)) - E * X.col(c)).norm() < 1e-13 * E.norm() * X.col(c).norm());
        }
        const int n = in.sys.n;
        for (cplx s : sample_points(seed, 3)) {
            // Schur complement of A - sE onto the leading block
            const CMat M = A.cast<cplx>() - s * E.cast<cplx>();
            const int N = P.size();
            const CMat S = M.topLeftCorner(n, n) -
                           M.topRightCorner(n, N - n) *
                               M.bottomRightCorner(N - n, N - n).partialPivLu().solve(M.bottomLeftCorner(N - n, n));
            const CMat Rd = inst::R_direct(in, s);
            CHECK((S - Rd).norm() < 1e-9 * Rd.norm());
            CHECK((P.R(s) - Rd).norm() < 1e-10 * Rd.norm());
            CHECK((P.R(std::conj(s)) - P.R(s).conjugate()).norm() < 1e-12 * Rd.norm());
        }
        CHECK((P.R_real(0.3) - P.R(0.3).real()).norm() < 1e-13 * P.R_real(0.3).norm());
    }
}

TEST_CASE("pencil eigenvalues are the eigenvalues of R") {
    for (unsigned seed = 1; seed <= 15; ++seed) {
        const auto in = inst::make(seed);
        CAPTURE(seed);
        CAPTURE(in.kind);
        const auto P = assemble_system_pencil(in.sys, in.lin);
        Eigen::GeneralizedEigenSolver<RMat> ges(P.dense_A(), P.dense_E(), false);
        std::vector<cplx> lam;
        for (int i = 0; i < P.size(); ++i)
            if (std::abs(ges.betas()(i)) > 1e-10 * std::abs(ges.alphas()(i)))
                lam.push_back(ges.alphas()(i) / ges.betas()(i));
        double radius = 1.0;
        for (cplx p : in.poles) radius = std::max(radius, std::abs(p));
        const auto ref = oracle::polynomial_eigenvalues(inst::cleared_polynomial(in, 1.1 * radius));
        CHECK(lam.size() == ref.size());
        CHECK(oracle::match_distance(lam, ref) < 1e-6);
        for (cplx l : lam) {
            bool near_pole = false;
            for (cplx p : in.poles) near_pole |= std::abs(l - p) < 1e-3;
            if (near_pole) continue;
            Eigen::JacobiSVD<CMat> svd(inst::R_direct(in, l));
            const auto& sv = svd.singularValues();
            CHECK(sv(sv.size() - 1) < 1e-6 * sv(0));
        }
    }
}

TEST_CASE("exported pencils are real and round trip") {
    const auto in = inst::make(7);
    const auto P = assemble_system_pencil(in.sys, in.lin);
    const auto dir = std::filesystem::temp_directory_path() / "ratlin_test_export";
    export_pencil(P, dir.string());
    const RMat A = read_matrix_market((dir / "A.mtx").string());
    const RMat E = read_matrix_market((dir / "E.mtx").string());
    CHECK(A == P.dense_A());
    CHECK(E == P.dense_E());
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(strong_barycentric_linearization({cplx(0, 1)}, {cplx(1)}, {{cplx(1)}}), ConfigError);
    CHECK_THROWS_AS(strong_barycentric_linearization({cplx(1), cplx(1)}, {cplx(1), cplx(1)}, {{cplx(1), cplx(2)}}),
                    ConfigError);
    RefitApproximant r;
    r.basis.kind = BasisKind::PartialFraction;
    r.basis.poles = {cplx(-1), cplx(-1)};
    r.basis.xi = {1, 1};
    r.gamma = {{0.0, 0.0}};
    r.alpha0 = r.alpha1 = r.alpha2 = {0};
    CHECK_THROWS_AS(linearize_refit(r), ConfigError);
    const auto in = inst::make(2);
    SplitFormSystem sys = in.sys;
    sys.Aneg.push_back(sys.A0);
    sys.g.push_back([](cplx) { return cplx(1.0); });
    sys.names.push_back("extra");
    CHECK_THROWS_AS(assemble_system_pencil(sys, in.lin), DimensionError);
    CHECK_THROWS_AS(dual_basis_phi(in.lin.basis, in.poles[0]), PoleError);
}
