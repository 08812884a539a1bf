#include "ratlin/aaa.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <random>

#include "ratlin/errors.hpp"
#include "ratlin/linalg.hpp"
#include "ratlin/linearize.hpp"

namespace ratlin {

namespace {

constexpr double kDoubletRatio = 1e-14;
constexpr double kImagTruncation = 1e-12;

bool is_real(cplx z) { return z.imag() == 0.0; }

// Checks the pair layout: every complex entry is followed by its conjugate.
void check_pairs(const std::vector<cplx>& p, const char* what) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (is_real(p[i])) continue;
        if (i + 1 >= p.size() || p[i + 1] != std::conj(p[i]))
            throw GridError(std::string(what) + ": complex points must be followed by their conjugate");
        ++i;
    }
}

RVec random_probe(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RVec v(n);
    for (int i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

}  // namespace

SampleGrid log_imaginary_grid(double f_min, double f_max, int n) {
    if (!(f_min > 0) || !(f_max > f_min) || !std::isfinite(f_max))
        throw GridError("log_imaginary_grid: need 0 < f_min < f_max");
    if (n < 2) throw GridError("log_imaginary_grid: need n >= 2");
    SampleGrid Z;
    Z.f_min = f_min;
    Z.f_max = f_max;
    Z.n_requested = n;
    const double lo = std::log10(2 * M_PI * f_min);
    const double hi = std::log10(2 * M_PI * f_max);
    for (int k = 0; k < n; ++k) {
        double w;
        if (k == 0)
            w = 2 * M_PI * f_min;
        else if (k == n - 1)
            w = 2 * M_PI * f_max;
        else
            w = std::pow(10.0, lo + (hi - lo) * k / (n - 1));
        Z.omega.push_back(w);
        Z.points.emplace_back(0.0, w);
        Z.points.emplace_back(0.0, -w);
    }
    return Z;
}

FunctionSet make_set_valued(std::vector<ScalarFunction> g) {
    if (g.empty()) throw ConfigError("function set must not be empty");
    FunctionSet fs;
    fs.g = std::move(g);
    fs.kind = ScaleKind::SetValued;
    return fs;
}

double estimate_frobenius_norm(const std::function<RVec(const RVec&)>& matvec, int n,
                               std::uint64_t seed) {
    if (n < 1) throw DimensionError("estimate_frobenius_norm: n must be positive");
    const RVec v = random_probe(n, seed);
    return std::sqrt(static_cast<double>(n)) * matvec(v).norm() / v.norm();
}

FunctionSet make_weighted(const SplitFormSystem& sys, std::uint64_t seed,
                          std::vector<ScalarFunction> drivers, std::vector<int> powers) {
    sys.validate();
    const int m = sys.m();
    if (m < 1) throw ConfigError("weighted AAA needs at least one nonlinear term");
    if (drivers.empty()) drivers = sys.g;
    if (powers.empty()) powers.assign(m, 0);
    if (static_cast<int>(drivers.size()) != m || static_cast<int>(powers.size()) != m)
        throw DimensionError("make_weighted: one driver and power per term");

    const int n = sys.n;
    const RVec v = random_probe(n, seed);
    RMat B(n, 3 + m);
    B.col(0) = sys.A0 * v;
    B.col(1) = sys.A1 * v;
    B.col(2) = sys.A2 * v;
    for (int j = 0; j < m; ++j) B.col(3 + j) = sys.Aneg[j] * v;
    Eigen::HouseholderQR<RMat> qr(B);
    const int k = std::min(n, 3 + m);
    const RMat R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

    WeightedInfo info;
    info.w0 = R.col(0);
    info.w1 = R.col(1);
    info.w2 = R.col(2);
    const double scale = std::sqrt(static_cast<double>(n)) / v.norm();
    for (int j = 0; j < m; ++j) {
        info.wneg.push_back(R.col(3 + j));
        info.aneg_norm.push_back(scale * B.col(3 + j).norm());
    }
    info.split_g = sys.g;
    info.s_power = powers;

    FunctionSet fs;
    fs.g = std::move(drivers);
    fs.kind = ScaleKind::Weighted;
    fs.weighted = std::move(info);
    return fs;
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Tolerance: return "tolerance";
        case StopReason::DegreeCap: return "degree-cap";
        case StopReason::Doublet: return "doublet";
        case StopReason::GridExhausted: return "grid-exhausted";
    }
    return "unknown";
}

GridValues sample(const FunctionSet& fs, const SampleGrid& Z) {
    GridValues gv;
    gv.upper.resize(fs.m());
    for (int j = 0; j < fs.m(); ++j) {
        gv.upper[j].resize(Z.pairs());
        for (int k = 0; k < Z.pairs(); ++k) gv.upper[j][k] = fs.g[j](Z.upper(k));
    }
    return gv;
}

RMat build_real_loewner(const std::vector<cplx>& Z, const std::vector<cplx>& sigma,
                        const std::vector<std::vector<cplx>>& FZ,
                        const std::vector<std::vector<cplx>>& Fs,
                        const std::vector<double>& row_scale) {
    check_pairs(Z, "build_real_loewner (Z)");
    check_pairs(sigma, "build_real_loewner (sigma)");
    const std::size_t m = FZ.size();
    if (Fs.size() != m || row_scale.size() != m)
        throw DimensionError("build_real_loewner: inconsistent function count");
    const Eigen::Index nz = static_cast<Eigen::Index>(Z.size());
    const Eigen::Index d = static_cast<Eigen::Index>(sigma.size());
    for (std::size_t j = 0; j < m; ++j)
        if (static_cast<Eigen::Index>(FZ[j].size()) != nz || static_cast<Eigen::Index>(Fs[j].size()) != d)
            throw DimensionError("build_real_loewner: value array size");
    for (cplx s : sigma)
        if (std::find(Z.begin(), Z.end(), s) != Z.end())
            throw GridError("build_real_loewner: support point inside the active grid");

    const double r2 = 1.0 / std::sqrt(2.0);
    const cplx I(0.0, 1.0);
    RMat out(nz * static_cast<Eigen::Index>(m), d);
    double max_imag = 0.0, fro2 = 0.0;

    for (std::size_t j = 0; j < m; ++j) {
        const Eigen::Index base = static_cast<Eigen::Index>(j) * nz;
        auto entry = [&](Eigen::Index a, Eigen::Index b) {
            const cplx v = row_scale[j] * (FZ[j][a] - Fs[j][b]) / (Z[a] - sigma[b]);
            fro2 += std::norm(v);
            return v;
        };
        for (Eigen::Index a = 0; a < nz;) {
            const bool rp = !is_real(Z[a]);
            for (Eigen::Index b = 0; b < d;) {
                const bool cp = !is_real(sigma[b]);
                // 2x2 (or smaller) complex block, then T * block * S
                Eigen::Matrix2cd blk = Eigen::Matrix2cd::Zero();
                const int nr = rp ? 2 : 1, nc = cp ? 2 : 1;
                for (int p = 0; p < nr; ++p)
                    for (int q = 0; q < nc; ++q) blk(p, q) = entry(a + p, b + q);
                if (cp) {
                    const Eigen::Matrix2cd S{{1.0, I}, {1.0, -I}};
                    blk = (blk * S).eval();
                }
                if (rp) {
                    const Eigen::Matrix2cd T{{r2, r2}, {-I * r2, I * r2}};
                    blk = (T * blk).eval();
                }
                for (int p = 0; p < nr; ++p)
                    for (int q = 0; q < nc; ++q) {
                        max_imag = std::max(max_imag, std::abs(blk(p, q).imag()));
                        out(base + a + p, b + q) = blk(p, q).real();
                    }
                b += nc;
            }
            a += rp ? 2 : 1;
        }
    }
    if (max_imag > kImagTruncation * std::sqrt(fro2))
        throw std::domain_error("build_real_loewner: transformed matrix is not real (function not real?)");
    return out;
}

std::vector<cplx> back_transform_weights(const std::vector<cplx>& sigma, const RVec& w) {
    if (static_cast<Eigen::Index>(sigma.size()) != w.size())
        throw DimensionError("back_transform_weights: size mismatch");
    std::vector<cplx> xi(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (is_real(sigma[i])) {
            xi[i] = w(i);
        } else {
            xi[i] = cplx(w(i), w(i + 1));
            xi[i + 1] = cplx(w(i), -w(i + 1));
            ++i;
        }
    }
    return xi;
}

cplx eval_barycentric(const BarycentricApproximant& r, int j, cplx s) {
    if (j < 0 || j >= r.m()) throw DimensionError("eval_barycentric: function index");
    cplx num = 0.0, den = 0.0;
    for (int i = 0; i < r.degree(); ++i)
        if (s == r.support[i]) return r.values[j][i];
    // conjugate pairs are summed first so that r(conj s) = conj r(s) holds exactly
    for (int i = 0; i < r.degree(); ++i) {
        const cplx t = r.weights[i] / (s - r.support[i]);
        if (i + 1 < r.degree() && r.support[i].imag() != 0 && r.support[i + 1] == std::conj(r.support[i])) {
            const cplx t2 = r.weights[i + 1] / (s - r.support[i + 1]);
            num += t * r.values[j][i] + t2 * r.values[j][i + 1];
            den += t + t2;
            ++i;
            continue;
        }
        num += t * r.values[j][i];
        den += t;
    }
    if (den == cplx(0.0) || !std::isfinite(std::abs(num / den)))
        throw PoleError("eval_barycentric: s is a pole");
    return num / den;
}

std::vector<cplx> barycentric_poles(const BarycentricApproximant& r) {
    if (r.degree() < 2) return {};
    const DualBasis db = barycentric_dual_basis(r.support, r.weights);
    return pencil_eigenvalues(db.C0, db.C1).finite;
}

namespace {

struct Evaluation {
    std::vector<std::vector<cplx>> r;  // [j][k] on upper grid, only active entries meaningful
};

// r_j at the active upper grid points
void evaluate_active(const std::vector<cplx>& sup, const std::vector<cplx>& xi,
                     const std::vector<std::vector<cplx>>& vals, const std::vector<double>& constant,
                     const SampleGrid& Z, const std::vector<char>& active,
                     std::vector<std::vector<cplx>>& out) {
    const int m = static_cast<int>(out.size());
    for (int k = 0; k < Z.pairs(); ++k) {
        if (!active[k]) continue;
        if (sup.empty()) {
            for (int j = 0; j < m; ++j) out[j][k] = constant[j];
            continue;
        }
        const cplx z = Z.upper(k);
        cplx den = 0.0;
        std::vector<cplx> num(m, 0.0);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            const cplx t = xi[i] / (z - sup[i]);
            den += t;
            for (int j = 0; j < m; ++j) num[j] += t * vals[j][i];
        }
        for (int j = 0; j < m; ++j) out[j][k] = num[j] / den;
    }
}

cplx ipow(cplx z, int p) {
    cplx out = 1.0;
    for (int i = 0; i < p; ++i) out *= z;
    return out;
}

}  // namespace

WeightedEstimate weighted_error_estimate(const FunctionSet& fs, const BarycentricApproximant& r,
                                         const SampleGrid& Z) {
    if (!fs.weighted) throw ConfigError("weighted_error_estimate: function set is not weighted");
    const WeightedInfo& w = *fs.weighted;
    if (r.m() != fs.m()) throw DimensionError("weighted_error_estimate: function count");
    WeightedEstimate est;
    for (int k = 0; k < Z.pairs(); ++k) {
        const cplx z = Z.upper(k);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(w.w0.size());
        Eigen::VectorXcd a = w.w0.cast<cplx>() + z * w.w1.cast<cplx>() + z * z * w.w2.cast<cplx>();
        for (int j = 0; j < fs.m(); ++j) {
            const cplx diff = (fs.g[j](z) - eval_barycentric(r, j, z)) * ipow(z, w.s_power[j]);
            e += diff * w.wneg[j].cast<cplx>();
            a += w.split_g[j](z) * w.wneg[j].cast<cplx>();
        }
        est.error.push_back(e.norm());
        est.Av.push_back(a.norm());
    }
    return est;
}

BarycentricApproximant real_aaa(const FunctionSet& fs, const SampleGrid& Z, double tol, int d_max) {
    const int m = fs.m();
    const int N = Z.pairs();
    if (m < 1) throw ConfigError("real_aaa: empty function set");
    if (!(tol >= 0)) throw ConfigError("real_aaa: tolerance must be >= 0");
    if (d_max < 1) throw ConfigError("real_aaa: d_max must be >= 1");
    if (2 * N <= 2 * d_max) throw GridError("real_aaa: grid must be larger than 2 d_max");
    if (fs.kind == ScaleKind::Weighted && !fs.weighted)
        throw ConfigError("real_aaa: weighted set without system data");

    const GridValues gv = sample(fs, Z);
    std::vector<double> gnorm(m, 0.0), constant(m, 0.0);
    for (int j = 0; j < m; ++j) {
        cplx sum = 0.0;
        for (int k = 0; k < N; ++k) {
            gnorm[j] = std::max(gnorm[j], std::abs(gv.upper[j][k]));
            sum += gv.upper[j][k];
        }
        constant[j] = sum.real() / N;
    }

    std::vector<double> row_scale(m), sel_scale(m);
    for (int j = 0; j < m; ++j) {
        if (fs.kind == ScaleKind::SetValued) {
            row_scale[j] = sel_scale[j] = gnorm[j] > 0 ? 1.0 / gnorm[j] : 1.0;
        } else {
            row_scale[j] = sel_scale[j] = fs.weighted->aneg_norm[j];
        }
    }

    // weighted data: per upper point coordinates of A(z)v and z^p
    double av_max = 0.0;
    std::vector<std::vector<cplx>> zpow(m, std::vector<cplx>(N, 1.0));
    if (fs.kind == ScaleKind::Weighted) {
        const WeightedInfo& w = *fs.weighted;
        for (int k = 0; k < N; ++k) {
            const cplx z = Z.upper(k);
            Eigen::VectorXcd a = w.w0.cast<cplx>() + z * w.w1.cast<cplx>() + z * z * w.w2.cast<cplx>();
            for (int j = 0; j < m; ++j) {
                a += w.split_g[j](z) * w.wneg[j].cast<cplx>();
                zpow[j][k] = ipow(z, w.s_power[j]);
            }
            av_max = std::max(av_max, a.norm());
        }
    }

    std::vector<char> active(N, 1);
    std::vector<cplx> sup, xi;
    std::vector<std::vector<cplx>> vals(m);
    std::vector<std::vector<cplx>> rv(m, std::vector<cplx>(N));

    // Measures the current fit; returns the relative error used for stopping
    // and fills the selection error per point.
    std::vector<double> sel(N, 0.0);
    auto measure = [&]() {
        evaluate_active(sup, xi, vals, constant, Z, active, rv);
        std::vector<double> maxerr(m, 0.0);
        double west = 0.0;
        for (int k = 0; k < N; ++k) {
            sel[k] = -1.0;
            if (!active[k]) continue;
            double e = 0.0;
            Eigen::VectorXcd acc;
            if (fs.kind == ScaleKind::Weighted) acc = Eigen::VectorXcd::Zero(fs.weighted->w0.size());
            for (int j = 0; j < m; ++j) {
                const cplx diff = gv.upper[j][k] - rv[j][k];
                const double a = std::abs(diff);
                maxerr[j] = std::max(maxerr[j], a);
                if (fs.kind == ScaleKind::Weighted) {
                    const cplx dz = diff * zpow[j][k];
                    acc += dz * fs.weighted->wneg[j].cast<cplx>();
                    e = std::max(e, sel_scale[j] * std::abs(dz));
                } else {
                    e = std::max(e, sel_scale[j] * a);
                }
            }
            if (fs.kind == ScaleKind::Weighted) west = std::max(west, acc.norm());
            sel[k] = e;
        }
        if (fs.kind == ScaleKind::Weighted) return av_max > 0 ? west / av_max : west;
        double rel = 0.0;
        for (int j = 0; j < m; ++j) rel = std::max(rel, gnorm[j] > 0 ? maxerr[j] / gnorm[j] : maxerr[j]);
        return rel;
    };

    auto snapshot = [&](bool converged, StopReason why) {
        BarycentricApproximant r;
        r.converged = converged;
        r.stop = why;
        if (sup.empty()) {
            // constant fit represented by one real support point
            r.support = {0.0};
            r.weights = {1.0};
            r.values.resize(m);
            for (int j = 0; j < m; ++j) r.values[j] = {constant[j]};
        } else {
            r.support = sup;
            r.weights = xi;
            r.values = vals;
        }
        return r;
    };

    double err = measure();
    std::optional<BarycentricApproximant> prev;
    double prev_err = 0.0;
    while (true) {
        if (err <= tol) return snapshot(true, StopReason::Tolerance);
        if (static_cast<int>(sup.size()) + 2 > d_max) return snapshot(false, StopReason::DegreeCap);

        int kbest = -1;
        for (int k = 0; k < N; ++k)
            if (active[k] && (kbest < 0 || sel[k] > sel[kbest])) kbest = k;
        if (kbest < 0) return snapshot(false, StopReason::GridExhausted);

        prev = snapshot(false, StopReason::Doublet);
        prev_err = err;

        const cplx zs = Z.upper(kbest);
        sup.push_back(zs);
        sup.push_back(std::conj(zs));
        for (int j = 0; j < m; ++j) {
            vals[j].push_back(gv.upper[j][kbest]);
            vals[j].push_back(std::conj(gv.upper[j][kbest]));
        }
        active[kbest] = 0;

        std::vector<cplx> za;
        std::vector<std::vector<cplx>> fz(m);
        for (int k = 0; k < N; ++k) {
            if (!active[k]) continue;
            za.push_back(Z.upper(k));
            za.push_back(std::conj(Z.upper(k)));
            for (int j = 0; j < m; ++j) {
                fz[j].push_back(gv.upper[j][k]);
                fz[j].push_back(std::conj(gv.upper[j][k]));
            }
        }
        if (za.size() < sup.size()) return snapshot(false, StopReason::GridExhausted);
        const RMat L = build_real_loewner(za, sup, fz, vals, row_scale);
        const SingularPair sp = smallest_right_singular_vector(L);
        xi = back_transform_weights(sup, sp.v);

        err = measure();
        if (sp.sigma < kDoubletRatio * sp.sigma_max) {
            if (prev && prev_err < err) return *prev;
            return snapshot(err <= tol, err <= tol ? StopReason::Tolerance : StopReason::Doublet);
        }
    }
}

}  // namespace ratlin
