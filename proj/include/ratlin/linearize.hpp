#pragma once

#include <string>

#include "ratlin/models.hpp"
#include "ratlin/types.hpp"

namespace ratlin {

struct BarycentricApproximant;
struct RefitApproximant;

/// Real dual basis: (c0 + s c1) + (C0 + s C1) Phi(s) = 0.
struct DualBasis {
    RVec c0, c1;
    RMat C0, C1;

    int size() const { return static_cast<int>(C0.rows()); }
};

/// r_j(s) = alpha0_j + s alpha1_j + s^2 alpha2_j + a_j^T Phi(s)
///        = alpha_j - a_j^T (C0 + s C1)^{-1} (c0 + s c1) + ...
struct ScalarLinearization {
    DualBasis basis;
    std::vector<RVec> a;
    std::vector<double> alpha0, alpha1, alpha2;

    int dim() const { return basis.size(); }
    int m() const { return static_cast<int>(a.size()); }
    void validate() const;
};

/// Dual basis of the strong barycentric pencil (size d-1).
DualBasis barycentric_dual_basis(const std::vector<cplx>& support, const std::vector<cplx>& weights);

/// Complex pencil L = L0 + s L1 before and after realification, kept for tests.
struct BarycentricStages {
    CMat L2_0, L2_1;   // rows: m function rows, e-row, d-1 coupling rows
    RMat L3_0, L3_1;   // T_L L2 T_R^{-1}
    std::vector<int> order;  // support permutation used
    int eliminated = -1;     // column of Psi removed in the reduction (0-based within Psi)
};

BarycentricStages barycentric_stages(const std::vector<cplx>& support, const std::vector<cplx>& weights,
                                     const std::vector<std::vector<cplx>>& values);

ScalarLinearization strong_barycentric_linearization(const BarycentricApproximant& r);
ScalarLinearization strong_barycentric_linearization(const std::vector<cplx>& support,
                                                     const std::vector<cplx>& weights,
                                                     const std::vector<std::vector<cplx>>& values);

ScalarLinearization partial_fraction_linearization(const RefitApproximant& r);
ScalarLinearization inverse_newton_linearization(const RefitApproximant& r);

/// Dispatches on the basis kind of a refit.
ScalarLinearization linearize_refit(const RefitApproximant& r);

/// Replaces r_j by s r_j.  Needs alpha2_j = 0 and nonsingular C1.
void multiply_by_s(ScalarLinearization& lin, int j);

CVec dual_basis_phi(const DualBasis& b, cplx s);
cplx schur_complement_eval(const ScalarLinearization& lin, int j, cplx s);

struct RankReport {
    int rank_infinity = 0;  // rank of [c1 C1]
    int min_rank_finite = 0;
    int expected = 0;
    bool full() const { return rank_infinity == expected && min_rank_finite == expected; }
};

RankReport dual_basis_rank(const DualBasis& b, const std::vector<cplx>& samples);

/// -E x' + A x = b with
///   A = [At0 0 Ah; 0 -I 0; c0(x)I 0 C0(x)I],  E = -[At1 At2 0; I 0 0; c1(x)I 0 C1(x)I].
struct RealBlockPencil {
    int n = 0, dt = 0, m = 0;
    RMat At0, At1, At2;
    std::vector<RMat> Aneg;
    std::vector<RVec> a;  // coefficient rows, one per function
    DualBasis basis;

    int size() const { return n * (2 + dt); }
    RMat dense_A() const;
    RMat dense_E() const;
    RMat Ahat_block(int i) const;

    /// R(s) = At0 + s At1 + s^2 At2 + sum_j A_-j a_j^T Phi(s)
    CMat R(cplx s) const;
    RMat R_real(double s) const;
    CVec Phi(cplx s) const { return dual_basis_phi(basis, s); }

    RVec apply_A(const RVec& x) const;
    RVec apply_E(const RVec& x) const;
};

RealBlockPencil assemble_system_pencil(const SplitFormSystem& sys, const ScalarLinearization& lin);

/// Writes A.mtx, E.mtx and manifest.json into dir.
void export_pencil(const RealBlockPencil& P, const std::string& dir);

}  // namespace ratlin
