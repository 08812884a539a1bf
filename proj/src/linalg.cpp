#include "ratlin/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace ratlin {

SingularPair smallest_right_singular_vector(const RMat& M) {
    if (M.rows() == 0 || M.cols() == 0)
        throw DimensionError("smallest_right_singular_vector: empty matrix");
    if (M.rows() < M.cols())
        throw DimensionError("smallest_right_singular_vector: need rows >= cols");
    Eigen::JacobiSVD<RMat, Eigen::ColPivHouseholderQRPreconditioner> svd(
        M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const Eigen::Index k = M.cols() - 1;
    SingularPair out;
    out.sigma = sv(k);
    out.sigma_max = sv(0);
    out.v = svd.matrixV().col(k);
    out.u = svd.matrixU().col(k);
    return out;
}

PencilSpectrum pencil_eigenvalues(const RMat& C0, const RMat& C1) {
    if (C0.rows() != C0.cols() || C1.rows() != C1.cols() || C0.rows() != C1.rows())
        throw DimensionError("pencil_eigenvalues: shape mismatch");
    PencilSpectrum out;
    const Eigen::Index n = C0.rows();
    if (n == 0) return out;
    // det(C0 + s C1) = 0  <=>  C0 x = s (-C1) x
    const RMat B = -C1;
    Eigen::GeneralizedEigenSolver<RMat> ges(C0, B, false);
    if (ges.info() != Eigen::Success)
        throw RegularityError("pencil_eigenvalues: QZ iteration failed");
    const auto alphas = ges.alphas();
    const auto betas = ges.betas();
    const double eps = std::numeric_limits<double>::epsilon();
    const double na = std::max(C0.norm(), std::numeric_limits<double>::min());
    const double nb = std::max(C1.norm(), std::numeric_limits<double>::min());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = std::abs(alphas(i));
        const double b = std::abs(betas(i));
        const bool a_small = a <= 100 * n * eps * na;
        const bool b_small = b <= 100 * n * eps * nb;
        if (a_small && b_small)
            throw RegularityError("pencil_eigenvalues: singular pencil");
        if (b_small) {
            ++out.infinite;
            continue;
        }
        out.finite.push_back(alphas(i) / betas(i));
    }
    return out;
}

LeastSquaresResult least_squares_solve(const RMat& M, const RVec& rhs) {
    if (M.rows() < M.cols())
        throw DimensionError("least_squares_solve: need rows >= cols");
    if (rhs.size() != M.rows()) throw DimensionError("least_squares_solve: rhs size");
    LeastSquaresResult out;
    if (M.cols() == 0) {
        out.x = RVec(0);
        out.residual = rhs.norm();
        return out;
    }
    Eigen::BDCSVD<RMat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankTolerance);
    out.x = svd.solve(rhs);
    out.rank = static_cast<int>(svd.rank());
    out.rank_deficient = out.rank < M.cols();
    const auto& sv = svd.singularValues();
    out.cond = out.rank_deficient || sv(sv.size() - 1) == 0
                   ? std::numeric_limits<double>::infinity()
                   : sv(0) / sv(sv.size() - 1);
    out.residual = (M * out.x - rhs).norm();
    return out;
}

RVec dense_lu_solve(const RMat& M, const RVec& rhs) {
    return DenseLU<double>(M).solve(rhs);
}

CVec dense_lu_solve(const CMat& M, const CVec& rhs) {
    return DenseLU<cplx>(M).solve(rhs);
}

double smallest_singular_value(const CMat& M) {
    if (M.size() == 0) throw DimensionError("smallest_singular_value: empty matrix");
    Eigen::JacobiSVD<CMat> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace ratlin
