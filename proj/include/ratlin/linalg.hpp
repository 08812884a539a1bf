#pragma once

#include <Eigen/LU>

#include "ratlin/errors.hpp"
#include "ratlin/types.hpp"

namespace ratlin {

// Relative cut-off below which a singular value counts as zero.
inline constexpr double kRankTolerance = 1e-13;

struct SingularPair {
    RVec v;            // right singular vector, unit 2-norm
    RVec u;            // matching left singular vector
    double sigma = 0;  // smallest singular value
    double sigma_max = 0;
};

/// Smallest singular value of M (rows >= cols) with its singular vectors.
SingularPair smallest_right_singular_vector(const RMat& M);

struct PencilSpectrum {
    std::vector<cplx> finite;
    int infinite = 0;
};

/// Roots of det(C0 + s C1) = 0. Infinite eigenvalues are counted, not listed.
/// Throws RegularityError when the pencil is (numerically) singular.
PencilSpectrum pencil_eigenvalues(const RMat& C0, const RMat& C1);

struct LeastSquaresResult {
    RVec x;
    double residual = 0;
    int rank = 0;
    bool rank_deficient = false;
    double cond = 0;  // 2-norm condition number, inf when rank deficient
};

/// Minimum-norm least-squares solution of M x = rhs via SVD.
LeastSquaresResult least_squares_solve(const RMat& M, const RVec& rhs);

/// LU factorization with partial pivoting that refuses singular input.
template <class Scalar>
class DenseLU {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    DenseLU() = default;
    explicit DenseLU(const Mat& M) { factor(M); }

    void factor(const Mat& M) {
        if (M.rows() != M.cols() || M.rows() == 0)
            throw DimensionError("DenseLU: matrix must be square and nonempty");
        if (!M.allFinite()) throw SingularError("DenseLU: nonfinite entries");
        lu_.compute(M);
        const double rc = lu_.rcond();
        if (!(rc > std::numeric_limits<double>::epsilon()))
            throw SingularError("DenseLU: matrix singular to working precision");
        n_ = M.rows();
    }

    template <class Rhs>
    auto solve(const Rhs& b) const {
        if (b.rows() != n_) throw DimensionError("DenseLU: rhs size mismatch");
        return lu_.solve(b).eval();
    }

    Eigen::Index size() const { return n_; }
    double rcond() const { return lu_.rcond(); }

private:
    Eigen::PartialPivLU<Mat> lu_;
    Eigen::Index n_ = 0;
};

RVec dense_lu_solve(const RMat& M, const RVec& rhs);
CVec dense_lu_solve(const CMat& M, const CVec& rhs);

/// Smallest singular value of a complex matrix (test and diagnostic use).
double smallest_singular_value(const CMat& M);

}  // namespace ratlin
