#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ratlin/aaa.hpp"
#include "ratlin/linearize.hpp"
#include "ratlin/refit.hpp"

namespace ratlin {

enum class Method { AAA, AAA_LS, E_AAA, F_AAA, S_AAA, E_F_AAA, E_S_AAA };
Method parse_method(const std::string& s);
std::string to_string(Method m);
bool is_extended(Method m);

/// "none" -> 0, "s" -> 1, "s2" -> 2 (division of the last function by s^p).
int parse_prep(const std::string& s);

struct ApproxConfig {
    double f_min = 1.0;
    double f_max = 1e4;
    int nz = 10000;
    double tol = 1e-13;
    Method method = Method::AAA;
    std::vector<int> powers;           // per function, empty = all zero
    std::optional<ScaleKind> scaling;  // default: set-valued for m = 1, weighted otherwise
    int d_max = 0;                     // 0: min(80, nz - 1)
    std::uint64_t seed = 1;
    BasisKind pole_basis = BasisKind::PartialFraction;

    void validate() const;
};

struct Approximation {
    ApproxConfig config;
    SampleGrid grid;
    std::vector<ScalarFunction> targets;  // functions of the split form
    std::vector<ScalarFunction> drivers;  // targets[j] / s^powers[j]
    std::vector<int> powers;
    BarycentricApproximant aaa;
    std::vector<cplx> aaa_poles;
    std::optional<RefitApproximant> refit;
    bool refit_on_drivers = false;
    ScalarLinearization lin;  // represents the targets
    std::vector<cplx> poles;  // poles of the final approximant

    int m() const { return static_cast<int>(targets.size()); }
    bool converged() const { return aaa.converged; }
    cplx eval(int j, cplx s) const;
    double rms_error(int j) const;
};

Approximation approximate(const SplitFormSystem& sys, const ApproxConfig& cfg);

/// f, then |g_j| and |g_j - r_j| for every function on the upper grid points.
void write_approx_error_csv(const std::string& path, const Approximation& a);
/// re, im, stable (1 when Re < 0).
void write_poles_csv(const std::string& path, const std::vector<cplx>& poles);
void write_approximant_json(const std::string& path, const Approximation& a);

}  // namespace ratlin
