#pragma once

#include <string>

#include "ratlin/aaa.hpp"

namespace ratlin {

enum class BasisKind { Barycentric, PartialFraction, InverseNewton };
std::string to_string(BasisKind k);

enum class FilterMode { Drop, Flip };

/// Rational basis without the constant.  Poles (and barycentric support
/// points) are ordered reals first, then pairs (mu, conj mu) with Im mu > 0.
struct PoleBasis {
    BasisKind kind = BasisKind::PartialFraction;
    std::vector<cplx> poles;
    std::vector<double> xi;  // one positive scale per pole
    // barycentric only
    std::vector<cplx> support, weights;

    int size() const;
    void validate() const;
};

/// r_j(s) = alpha0 + s alpha1 + s^2 alpha2 + sum_i gamma[j][i] phi_i(s)
struct RefitApproximant {
    PoleBasis basis;
    std::vector<std::vector<cplx>> gamma;
    std::vector<double> alpha0, alpha1, alpha2;
    bool extended = false;

    // diagnostics
    bool rank_deficient = false;
    double cond = 0;
    bool switched_basis = false;
    bool polynomial_only = false;
    bool poles_simple = true;

    int m() const { return static_cast<int>(gamma.size()); }
    std::vector<cplx> poles() const;
};

/// Puts reals first and conjugate pairs (Im > 0 first) after; throws if a
/// complex entry has no conjugate partner.
std::vector<cplx> order_conjugate(const std::vector<cplx>& pts);

std::vector<cplx> filter_poles(const std::vector<cplx>& poles, FilterMode mode);

std::vector<double> scaling_weights(const std::vector<cplx>& poles, const SampleGrid& Z,
                                    BasisKind kind);

PoleBasis make_pole_basis(const std::vector<cplx>& poles, const SampleGrid& Z, BasisKind kind);
PoleBasis make_barycentric_basis(const BarycentricApproximant& r);

/// phi_i(s) in basis order (complex).
CVec basis_functions(const PoleBasis& b, cplx s);

/// Real functions psi = T_R phi: pairs become (phi + phi~, i (phi - phi~)).
RVec real_coefficients(const PoleBasis& b, const std::vector<cplx>& gamma);
std::vector<cplx> complex_coefficients(const PoleBasis& b, const RVec& a);

RefitApproximant ls_refit(const std::vector<ScalarFunction>& targets, const SampleGrid& Z,
                          const PoleBasis& basis, bool extended);

cplx eval_refit(const RefitApproximant& r, int j, cplx s);

double grid_rms_error(const std::function<cplx(cplx)>& approx, const ScalarFunction& g,
                      const SampleGrid& Z);

}  // namespace ratlin
