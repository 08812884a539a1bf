#pragma once

#include <cstdint>
#include <string>

#include "ratlin/types.hpp"

namespace ratlin {

struct BeamMaterial {
    double G0 = 350.4e3;    // Pa
    double Ginf = 3.062e6;  // Pa
    double tau = 8.23e-9;   // s
    double alpha = 0.675;

    void validate() const;
};

// SI units; eta is 0.1837 micro kg/(m s), Lambda 80 um, LambdaP 160 um.
struct PorousMaterial {
    double rho0 = 1.213;
    double c0 = 342.0;
    double Pr = 0.72;
    double gamma = 1.4;
    double eta = 0.1837e-6;
    double phi = 0.98;
    double alpha_inf = 1.7;
    double sigma = 13500.0;
    double Lambda = 80e-6;
    double LambdaP = 160e-6;

    void validate() const;
};

/// A(s) = A0 + s A1 + s^2 A2 + sum_j Aneg[j] g[j](s)
struct SplitFormSystem {
    int n = 0;
    RMat A0, A1, A2;
    std::vector<RMat> Aneg;
    std::vector<ScalarFunction> g;
    std::vector<std::string> names;

    int m() const { return static_cast<int>(Aneg.size()); }
    void validate() const;
    CMat eval(cplx s) const;
};

cplx beam_g1(cplx s, const BeamMaterial& mat = {});

cplx porous_g1(cplx s, const PorousMaterial& mat = {});
cplx porous_g2(cplx s, const PorousMaterial& mat = {});

/// s^(2-p) g2(s): the mass-side split-form function divided by s^p.
cplx porous_g2_prep(cplx s, int p, const PorousMaterial& mat = {});

/// s rho0 alpha_inf + sigma phi G_J(s); g1 = phi s rho0 / this.
cplx porous_g1_denominator(cplx s, const PorousMaterial& mat = {});
/// alpha'(s); g2 has a pole where it vanishes.
cplx porous_alpha_prime(cplx s, const PorousMaterial& mat = {});

double porous_g1_pole_estimate(const PorousMaterial& mat = {});
double porous_g1_branch_point(const PorousMaterial& mat = {});
double porous_g2_branch_point(const PorousMaterial& mat = {});
double porous_g2_pole(const PorousMaterial& mat = {});

enum class ModelKind { Beam, Porous };

ModelKind parse_model(const std::string& name);
std::string to_string(ModelKind k);

SplitFormSystem build_surrogate_system(ModelKind model, int n, std::uint64_t seed);

}  // namespace ratlin
