#include "ratlin/models.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "ratlin/errors.hpp"

namespace ratlin {

namespace {

bool on_negative_real_axis(cplx s) { return s.imag() == 0.0 && s.real() < 0.0; }

double sym_norm2(const RMat& A) {
    Eigen::SelfAdjointEigenSolver<RMat> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

void BeamMaterial::validate() const {
    if (!(G0 > 0 && Ginf > 0 && tau > 0)) throw ConfigError("BeamMaterial: G0, Ginf, tau must be > 0");
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("BeamMaterial: alpha must lie in (0,1)");
}

void PorousMaterial::validate() const {
    for (double v : {rho0, c0, Pr, gamma, eta, phi, alpha_inf, sigma, Lambda, LambdaP})
        if (!(v > 0)) throw ConfigError("PorousMaterial: parameters must be > 0");
    if (phi > 1) throw ConfigError("PorousMaterial: porosity must be <= 1");
}

void SplitFormSystem::validate() const {
    if (n < 1) throw DimensionError("SplitFormSystem: n must be positive");
    auto check = [&](const RMat& A, const char* what) {
        if (A.rows() != n || A.cols() != n)
            throw DimensionError(std::string("SplitFormSystem: bad shape for ") + what);
    };
    check(A0, "A0");
    check(A1, "A1");
    check(A2, "A2");
    for (const auto& A : Aneg) check(A, "A_-j");
    if (g.size() != Aneg.size()) throw DimensionError("SplitFormSystem: one function per A_-j");
}

CMat SplitFormSystem::eval(cplx s) const {
    CMat R = A0.cast<cplx>() + s * A1.cast<cplx>() + s * s * A2.cast<cplx>();
    for (int j = 0; j < m(); ++j) R += g[j](s) * Aneg[j].cast<cplx>();
    return R;
}

cplx beam_g1(cplx s, const BeamMaterial& mat) {
    if (s == cplx(0.0)) return mat.G0;
    if (on_negative_real_axis(s)) throw BranchCutError("beam_g1: s on the negative real axis");
    const cplx p = std::pow(s * mat.tau, mat.alpha);
    return (mat.G0 + mat.Ginf * p) / (1.0 + p);
}

cplx porous_g1_denominator(cplx s, const PorousMaterial& mat) {
    const double k = 4 * mat.alpha_inf * mat.alpha_inf * mat.eta * mat.rho0 /
                     (mat.sigma * mat.sigma * mat.Lambda * mat.Lambda * mat.phi * mat.phi);
    const cplx arg = 1.0 + k * s;
    if (arg.imag() == 0.0 && arg.real() < 0.0)
        throw BranchCutError("porous_g1: s beyond the branch point");
    const cplx GJ = std::sqrt(arg);
    return s * mat.rho0 * mat.alpha_inf + mat.sigma * mat.phi * GJ;
}

cplx porous_g1(cplx s, const PorousMaterial& mat) {
    if (s == cplx(0.0)) throw PoleError("porous_g1: s = 0 excluded");
    const cplx den = porous_g1_denominator(s, mat);
    if (den == cplx(0.0)) throw PoleError("porous_g1: pole");
    return mat.phi * s * mat.rho0 / den;
}

cplx porous_alpha_prime(cplx s, const PorousMaterial& mat) {
    if (s == cplx(0.0)) throw PoleError("porous_g2: s = 0 excluded");
    const double L2 = mat.LambdaP * mat.LambdaP;
    const cplx arg = 1.0 + mat.rho0 * s * mat.Pr * L2 / (16 * mat.eta);
    if (arg.imag() == 0.0 && arg.real() < 0.0)
        throw BranchCutError("porous_g2: s beyond the branch point");
    return 1.0 + 8 * mat.eta / (L2 * mat.Pr * s * mat.rho0) * std::sqrt(arg);
}

cplx porous_g2(cplx s, const PorousMaterial& mat) {
    const cplx ap = porous_alpha_prime(s, mat);
    if (ap == cplx(0.0)) throw PoleError("porous_g2: pole");
    return mat.phi * (mat.gamma - (mat.gamma - 1) / ap);
}

cplx porous_g2_prep(cplx s, int p, const PorousMaterial& mat) {
    if (p < 0 || p > 2) throw ConfigError("porous_g2_prep: power must be 0, 1 or 2");
    cplx f = porous_g2(s, mat);
    for (int k = p; k < 2; ++k) f *= s;
    return f;
}

double porous_g1_pole_estimate(const PorousMaterial& mat) {
    return -mat.sigma * mat.phi / (mat.rho0 * mat.alpha_inf);
}

double porous_g1_branch_point(const PorousMaterial& mat) {
    return -mat.sigma * mat.sigma * mat.Lambda * mat.Lambda * mat.phi * mat.phi /
           (4 * mat.alpha_inf * mat.alpha_inf * mat.eta * mat.rho0);
}

double porous_g2_branch_point(const PorousMaterial& mat) {
    return -16 * mat.eta / (mat.rho0 * mat.Pr * mat.LambdaP * mat.LambdaP);
}

double porous_g2_pole(const PorousMaterial& mat) {
    return -(std::sqrt(17.0) - 1) * 2 * mat.eta / (mat.LambdaP * mat.LambdaP * mat.Pr * mat.rho0);
}

ModelKind parse_model(const std::string& name) {
    if (name == "beam") return ModelKind::Beam;
    if (name == "porous") return ModelKind::Porous;
    throw ConfigError("unknown model '" + name + "'");
}

std::string to_string(ModelKind k) { return k == ModelKind::Beam ? "beam" : "porous"; }

namespace {

SplitFormSystem beam_surrogate(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mass(0.5, 1.5);
    std::bernoulli_distribution pick(0.5);

    RMat K = RMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = 2;
        if (i + 1 < n) K(i, i + 1) = K(i + 1, i) = -1;
    }
    RMat M = RMat::Zero(n, n);
    for (int i = 0; i < n; ++i) M(i, i) = mass(rng);

    // damping layer: element stiffness on a random subset of elements
    RMat C = RMat::Zero(n, n);
    bool any = false;
    for (int e = 0; e + 1 < n; ++e) {
        if (!pick(rng)) continue;
        any = true;
        C(e, e) += 1;
        C(e + 1, e + 1) += 1;
        C(e, e + 1) -= 1;
        C(e + 1, e) -= 1;
    }
    if (!any) {
        C(0, 0) += 1;
        C(1, 1) += 1;
        C(0, 1) -= 1;
        C(1, 0) -= 1;
    }

    SplitFormSystem sys;
    sys.n = n;
    sys.A0 = K * (2e9 / sym_norm2(K));
    sys.A1 = RMat::Zero(n, n);
    sys.A2 = M * (1e-3 / M.diagonal().maxCoeff());
    sys.Aneg.push_back(C * (4e2 / sym_norm2(C)));
    BeamMaterial mat;
    sys.g.push_back([mat](cplx s) { return beam_g1(s, mat); });
    sys.names.push_back("g1");
    return sys;
}

// 1-D duct, pressure fixed at x = 0, porous layer at the closed far end.
SplitFormSystem porous_surrogate(int n, std::mt19937_64& rng) {
    const double length = 1.0;
    const double he = length / n;
    std::uniform_real_distribution<double> frac(0.3, 0.5);
    const int n_porous = std::max(1, static_cast<int>(std::lround(frac(rng) * n)));
    const int first_porous = n - n_porous;

    RMat Ka = RMat::Zero(n, n), Kp = RMat::Zero(n, n);
    RMat Ma = RMat::Zero(n, n), Mp = RMat::Zero(n, n);
    // element e joins nodes e-1 and e; node -1 is the Dirichlet node
    for (int e = 0; e < n; ++e) {
        RMat& K = e >= first_porous ? Kp : Ka;
        RMat& M = e >= first_porous ? Mp : Ma;
        const int a = e - 1, b = e;
        const double k = 1.0 / he, mm = he / 6.0;
        K(b, b) += k;
        M(b, b) += 2 * mm;
        if (a >= 0) {
            K(a, a) += k;
            K(a, b) -= k;
            K(b, a) -= k;
            M(a, a) += 2 * mm;
            M(a, b) += mm;
            M(b, a) += mm;
        }
    }

    PorousMaterial mat;
    SplitFormSystem sys;
    sys.n = n;
    sys.A0 = Ka / mat.rho0;
    sys.A1 = RMat::Zero(n, n);
    sys.A2 = Ma / (mat.rho0 * mat.c0 * mat.c0);
    sys.Aneg.push_back(Kp / (mat.phi * mat.rho0));
    sys.Aneg.push_back(Mp / (mat.phi * mat.rho0 * mat.c0 * mat.c0));
    sys.g.push_back([mat](cplx s) { return porous_g1(s, mat); });
    sys.g.push_back([mat](cplx s) { return porous_g2_prep(s, 0, mat); });
    sys.names = {"g1", "g2"};
    return sys;
}

}  // namespace

SplitFormSystem build_surrogate_system(ModelKind model, int n, std::uint64_t seed) {
    if (n < 2) throw DimensionError("build_surrogate_system: n must be >= 2");
    std::mt19937_64 rng(seed);
    SplitFormSystem sys = model == ModelKind::Beam ? beam_surrogate(n, rng) : porous_surrogate(n, rng);
    sys.validate();
    return sys;
}

}  // namespace ratlin
