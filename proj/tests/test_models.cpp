#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <random>

#include "ratlin/models.hpp"
#include "ratlin/errors.hpp"

using namespace ratlin;
using boost::multiprecision::cpp_bin_float_50;
using boost::multiprecision::cpp_complex_50;

namespace {

using HP = cpp_bin_float_50;
using HC = cpp_complex_50;

HC hc(double re, double im) { return HC(HP(re), HP(im)); }

cplx lower(const HC& z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

// 50-digit evaluations of the closed forms, written independently of the library.
HC beam_hp(HC s) {
    BeamMaterial m;
    const HC p = exp(HP(m.alpha) * log(s * HP(m.tau)));
    return (HP(m.G0) + HP(m.Ginf) * p) / (HP(1) + p);
}

HC porous_g1_hp(HC s) {
    PorousMaterial m;
    const HP ai = m.alpha_inf, sig = m.sigma, phi = m.phi, rho = m.rho0, eta = m.eta, L = m.Lambda;
    const HC GJ = sqrt(HP(1) + HP(4) * ai * ai * eta * rho * s / (sig * sig * L * L * phi * phi));
    const HC alpha = ai * (HP(1) + (sig * phi / (s * rho * ai)) * GJ);
    return phi / alpha;
}

HC porous_g2_hp(HC s) {
    PorousMaterial m;
    const HP eta = m.eta, LP = m.LambdaP, Pr = m.Pr, rho = m.rho0, gam = m.gamma, phi = m.phi;
    const HC ap = HP(1) + HP(8) * eta / (LP * LP * Pr * s * rho) * sqrt(HP(1) + rho * s * Pr * LP * LP / (HP(16) * eta));
    return phi * (gam - (gam - HP(1)) / ap);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

template <class F>
double bisect(F f, double a, double b) {
    double fa = f(a);
    for (int k = 0; k < 200; ++k) {
        const double c = 0.5 * (a + b);
        const double fc = f(c);
        if ((fc < 0) == (fa < 0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("material defaults and validation") {
    BeamMaterial b;
    CHECK(b.G0 == 350.4e3);
    CHECK(b.Ginf == 3.062e6);
    CHECK(b.tau == 8.23e-9);
    CHECK(b.alpha == 0.675);
    CHECK_NOTHROW(b.validate());
    b.alpha = 1.0;
    CHECK_THROWS_AS(b.validate(), ConfigError);

    PorousMaterial p;
    CHECK(p.rho0 == 1.213);
    CHECK(p.phi == 0.98);
    CHECK(p.sigma == 13500.0);
    CHECK(p.Lambda == 80e-6);
    CHECK(p.LambdaP == 160e-6);
    CHECK_NOTHROW(p.validate());
    p.phi = 1.2;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("beam g1") {
    CHECK(beam_g1(0.0) == cplx(350.4e3));
    CHECK(rel(beam_g1(cplx(0, 1e20)), 3.062e6) < 1e-3);
    CHECK_THROWS_AS(beam_g1(-1.0), BranchCutError);

    const double w = 2 * M_PI * 100;
    CHECK(rel(beam_g1(cplx(0, w)), lower(beam_hp(hc(0, w)))) < 1e-13);
    for (double f : {1.0, 37.0, 1e3, 2.5e4})
        CHECK(rel(beam_g1(cplx(0, 2 * M_PI * f)), lower(beam_hp(hc(0, 2 * M_PI * f)))) < 1e-13);

    double prev = 0;
    for (int k = 0; k <= 300; ++k) {
        const double w2 = 2 * M_PI * std::pow(10.0, 1 + 3.0 * k / 300);
        const double a = std::abs(beam_g1(cplx(0, w2)));
        CHECK(a >= prev);
        prev = a;
    }
}

TEST_CASE("porous g1") {
    CHECK_THROWS_AS(porous_g1(0.0), PoleError);
    CHECK(rel(porous_g1(cplx(0, 1e14)), 0.98 / 1.7) < 1e-5);
    CHECK(std::abs(0.98 / 1.7 - 0.576470588) < 1e-9);
    const double w = 2 * M_PI * 100;
    CHECK(rel(porous_g1(cplx(0, w)), lower(porous_g1_hp(hc(0, w)))) < 1e-13);
    CHECK(rel(porous_g1(cplx(3, 7e3)), lower(porous_g1_hp(hc(3, 7e3)))) < 1e-13);

    // the denominator vanishes at a root located by bisection on the negative axis
    const double bp = porous_g1_branch_point();
    const double root = bisect([](double s) { return porous_g1_denominator(s).real(); }, bp * 0.999, -1.0);
    CHECK(std::abs(porous_g1_denominator(root)) < 1e-8 * 13500);
    CHECK(std::abs(root - porous_g1_pole_estimate()) / 6415.0 < 0.02);
    CHECK(porous_g1_pole_estimate() == doctest::Approx(-6415.0).epsilon(1e-3));
    CHECK(std::abs(porous_g1(cplx(root, 1e-3))) > 1e3);
    CHECK_THROWS_AS(porous_g1(bp * 2), BranchCutError);
}

TEST_CASE("porous g2") {
    CHECK_THROWS_AS(porous_g2(0.0), PoleError);
    CHECK(rel(porous_g2(cplx(0, 1e16)), 0.98) < 1e-6);
    const double w = 2 * M_PI * 100;
    CHECK(rel(porous_g2(cplx(0, w)), lower(porous_g2_hp(hc(0, w)))) < 1e-13);
    CHECK(rel(porous_g2(cplx(-5, 900)), lower(porous_g2_hp(hc(-5, 900)))) < 1e-13);

    PorousMaterial m;
    const double bp = -16 * m.eta / (m.rho0 * m.Pr * m.LambdaP * m.LambdaP);
    CHECK(std::abs(porous_g2_branch_point() - bp) <= 1e-12 * std::abs(bp));
    CHECK_THROWS_AS(porous_g2(bp * 1.5), BranchCutError);

    // alpha' has a real root in (bp, 0); compare with the stated closed form
    const double root = bisect([](double s) { return porous_alpha_prime(s).real(); }, bp * 0.999999, bp * 1e-6);
    CHECK(std::abs(root - porous_g2_pole()) <= 1e-10 * std::abs(root));

    for (int p = 0; p <= 2; ++p) {
        const cplx s(0.5, 400);
        CHECK(rel(porous_g2_prep(s, p), porous_g2(s) * std::pow(s, 2 - p)) < 1e-15);
    }
    CHECK_THROWS_AS(porous_g2_prep(1.0, 3), ConfigError);
}

TEST_CASE("model functions are real") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> re(0.0, 1e4), im(-1e5, 1e5);
    for (int k = 0; k < 100; ++k) {
        const cplx s(re(rng), im(rng));
        for (auto f : {+[](cplx z) { return beam_g1(z); }, +[](cplx z) { return porous_g1(z); },
                       +[](cplx z) { return porous_g2(z); }}) {
            const cplx v = f(s);
            CHECK(std::abs(f(std::conj(s)) - std::conj(v)) <= 1e-13 * (1 + std::abs(v)));
        }
    }
}

TEST_CASE("surrogate systems") {
    const auto b2 = build_surrogate_system(ModelKind::Beam, 2, 0);
    CHECK(b2.n == 2);
    CHECK(b2.m() == 1);
    CHECK((b2.A0 - b2.A0.transpose()).norm() == 0.0);
    CHECK((b2.A2 - b2.A2.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<RMat> e0(b2.A0), e2(b2.A2), en(b2.Aneg[0]);
    CHECK(e0.eigenvalues().minCoeff() >= 0);
    CHECK(e2.eigenvalues().minCoeff() >= 0);
    CHECK(en.eigenvalues().minCoeff() >= -1e-12 * en.eigenvalues().maxCoeff());
    const CMat A = b2.eval(cplx(0, 2 * M_PI * 100));
    CHECK(Eigen::JacobiSVD<CMat>(A).singularValues()(1) > 1e-6 * A.norm());

    const auto b50 = build_surrogate_system(ModelKind::Beam, 50, 1);
    const auto b50b = build_surrogate_system(ModelKind::Beam, 50, 1);
    CHECK(b50.A0 == b50b.A0);
    CHECK(b50.A2 == b50b.A2);
    CHECK(b50.Aneg[0] == b50b.Aneg[0]);
    Eigen::SelfAdjointEigenSolver<RMat> k50(b50.A0), c50(b50.Aneg[0]);
    CHECK(k50.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(2e9));
    CHECK(b50.A2.diagonal().maxCoeff() == doctest::Approx(1e-3));
    CHECK(c50.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(4e2));

    const auto p = build_surrogate_system(ModelKind::Porous, 20, 5);
    CHECK(p.m() == 2);
    PorousMaterial mat;
    const cplx s(0, 2 * M_PI * 50);
    CHECK(rel(p.g[0](s), porous_g1(s)) < 1e-15);
    CHECK(rel(p.g[1](s), s * s * porous_g2(s)) < 1e-15);
    // the split form reproduces (Ka + Kp g1/phi)/rho0 + s^2 (Ma + Mp g2/phi)/(rho0 c0^2)
    const RMat Ka = p.A0 * mat.rho0, Kp = p.Aneg[0] * mat.phi * mat.rho0;
    const RMat Ma = p.A2 * mat.rho0 * mat.c0 * mat.c0, Mp = p.Aneg[1] * mat.phi * mat.rho0 * mat.c0 * mat.c0;
    const CMat ref = (Ka.cast<cplx>() + Kp.cast<cplx>() * porous_g1(s) / mat.phi) / mat.rho0 +
                     s * s * (Ma.cast<cplx>() + Mp.cast<cplx>() * porous_g2(s) / mat.phi) / (mat.rho0 * mat.c0 * mat.c0);
    CHECK((p.eval(s) - ref).norm() <= 1e-13 * ref.norm());

    CHECK_THROWS_AS(build_surrogate_system(ModelKind::Beam, 1, 0), DimensionError);
    CHECK(parse_model("porous") == ModelKind::Porous);
    CHECK_THROWS_AS(parse_model("plate"), ConfigError);
}
