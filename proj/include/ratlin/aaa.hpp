#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ratlin/models.hpp"
#include "ratlin/types.hpp"

namespace ratlin {

/// Points on the imaginary axis stored as consecutive pairs (i w_k, -i w_k).
struct SampleGrid {
    std::vector<cplx> points;
    std::vector<double> omega;  // increasing, one per pair
    double f_min = 0, f_max = 0;
    int n_requested = 0;

    int pairs() const { return static_cast<int>(omega.size()); }
    cplx upper(int k) const { return points[2 * k]; }
};

SampleGrid log_imaginary_grid(double f_min, double f_max, int n);

enum class ScaleKind { SetValued, Weighted };

struct WeightedInfo {
    std::vector<double> aneg_norm;     // Frobenius estimates of A_{-j}
    RVec w0, w1, w2;                   // A_k v = Q w_k
    std::vector<RVec> wneg;            // A_{-j} v = Q w_{-j}
    std::vector<ScalarFunction> split_g;
    std::vector<int> s_power;          // driver j equals split_g[j] / s^p
};

struct FunctionSet {
    std::vector<ScalarFunction> g;
    ScaleKind kind = ScaleKind::SetValued;
    std::optional<WeightedInfo> weighted;

    int m() const { return static_cast<int>(g.size()); }
};

FunctionSet make_set_valued(std::vector<ScalarFunction> g);

/// Weighted set for a split-form system. drivers default to sys.g; when given,
/// driver j must equal sys.g[j] / s^powers[j].
FunctionSet make_weighted(const SplitFormSystem& sys, std::uint64_t seed,
                          std::vector<ScalarFunction> drivers = {}, std::vector<int> powers = {});

double estimate_frobenius_norm(const std::function<RVec(const RVec&)>& matvec, int n,
                               std::uint64_t seed);

enum class StopReason { Tolerance, DegreeCap, Doublet, GridExhausted };
std::string to_string(StopReason r);

struct BarycentricApproximant {
    std::vector<cplx> support;              // conjugate pairs stored consecutively
    std::vector<cplx> weights;
    std::vector<std::vector<cplx>> values;  // values[j][i] = g_j(support[i])
    bool converged = true;
    StopReason stop = StopReason::Tolerance;

    int degree() const { return static_cast<int>(support.size()); }
    int m() const { return static_cast<int>(values.size()); }
};

/// Function values of every g_j on the grid, upper points only.
struct GridValues {
    std::vector<std::vector<cplx>> upper;  // [j][k]
};

GridValues sample(const FunctionSet& fs, const SampleGrid& Z);

BarycentricApproximant real_aaa(const FunctionSet& fs, const SampleGrid& Z, double tol, int d_max);

/// Real transformed, stacked Loewner matrix.  Z and sigma list conjugate
/// pairs consecutively (real points stand alone); FZ[j], Fs[j] hold the
/// function values at Z and sigma; row_scale[j] scales function j.
RMat build_real_loewner(const std::vector<cplx>& Z, const std::vector<cplx>& sigma,
                        const std::vector<std::vector<cplx>>& FZ,
                        const std::vector<std::vector<cplx>>& Fs,
                        const std::vector<double>& row_scale);

/// Complex block-diagonal factor S applied to a real vector: pairs (w1, w2)
/// become (w1 + i w2, w1 - i w2).
std::vector<cplx> back_transform_weights(const std::vector<cplx>& sigma, const RVec& w);

cplx eval_barycentric(const BarycentricApproximant& r, int j, cplx s);

/// Finite roots of sum_i xi_i / (s - sigma_i).
std::vector<cplx> barycentric_poles(const BarycentricApproximant& r);

struct WeightedEstimate {
    std::vector<double> error;  // ||A(z)v - R(z)v|| per upper grid point
    std::vector<double> Av;     // ||A(z)v||
};

WeightedEstimate weighted_error_estimate(const FunctionSet& fs, const BarycentricApproximant& r,
                                         const SampleGrid& Z);

}  // namespace ratlin
