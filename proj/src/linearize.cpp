#include "ratlin/linearize.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "ratlin/aaa.hpp"
#include "ratlin/errors.hpp"
#include "ratlin/linalg.hpp"
#include "ratlin/matrix_market.hpp"
#include "ratlin/refit.hpp"

namespace ratlin {

namespace {

constexpr double kImagTruncation = 1e-12;

bool is_real(cplx z) { return z.imag() == 0.0; }

// reals first, then (sigma, conj sigma) with Im sigma > 0
std::vector<int> conjugate_order(const std::vector<cplx>& s) {
    std::vector<int> perm;
    std::vector<char> used(s.size(), 0);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (is_real(s[i])) {
            perm.push_back(static_cast<int>(i));
            used[i] = 1;
        }
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (used[i] || s[i].imag() < 0) continue;
        std::size_t k = 0;
        for (; k < s.size(); ++k)
            if (!used[k] && s[k] == std::conj(s[i])) break;
        if (k == s.size()) throw ConfigError("support points are not closed under conjugation");
        used[i] = used[k] = 1;
        perm.push_back(static_cast<int>(i));
        perm.push_back(static_cast<int>(k));
    }
    if (perm.size() != s.size()) throw ConfigError("support points are not closed under conjugation");
    return perm;
}

RMat take_real(const CMat& M, const char* what) {
    const double tol = kImagTruncation * std::max(1.0, M.norm());
    if (M.imag().cwiseAbs().maxCoeff() > tol)
        throw std::domain_error(std::string(what) + ": realified pencil has imaginary entries");
    return M.real();
}

int numeric_rank(const CMat& M) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(M);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * sv(0)) ++r;
    return r;
}

}  // namespace

void ScalarLinearization::validate() const {
    const int d = dim();
    if (basis.C1.rows() != d || basis.C0.cols() != d || basis.C1.cols() != d || basis.c0.size() != d ||
        basis.c1.size() != d)
        throw DimensionError("ScalarLinearization: dual basis shapes");
    if (alpha0.size() != a.size() || alpha1.size() != a.size() || alpha2.size() != a.size())
        throw DimensionError("ScalarLinearization: coefficient counts");
    for (const auto& v : a)
        if (v.size() != d) throw DimensionError("ScalarLinearization: coefficient row size");
}

BarycentricStages barycentric_stages(const std::vector<cplx>& support_in,
                                     const std::vector<cplx>& weights_in,
                                     const std::vector<std::vector<cplx>>& values_in) {
    const int d = static_cast<int>(support_in.size());
    const int m = static_cast<int>(values_in.size());
    if (d < 1) throw DimensionError("barycentric linearization: no support points");
    if (static_cast<int>(weights_in.size()) != d) throw DimensionError("barycentric linearization: weights");
    for (const auto& v : values_in)
        if (static_cast<int>(v.size()) != d) throw DimensionError("barycentric linearization: values");
    for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k)
            if (support_in[i] == support_in[k])
                throw ConfigError("barycentric linearization: duplicate support points");

    BarycentricStages st;
    st.order = conjugate_order(support_in);
    std::vector<cplx> sg(d), xi(d);
    std::vector<std::vector<cplx>> val(m, std::vector<cplx>(d));
    for (int i = 0; i < d; ++i) {
        sg[i] = support_in[st.order[i]];
        xi[i] = weights_in[st.order[i]];
        for (int j = 0; j < m; ++j) val[j][i] = values_in[j][st.order[i]];
        if (xi[i] == cplx(0.0)) throw ConfigError("barycentric linearization: zero weight");
    }
    int R = 0;
    while (R < d && is_real(sg[R])) ++R;
    const int P = (d - R) / 2;

    const int rows = m + 1 + (d - 1);
    const int cols = 1 + d;
    st.L2_0 = CMat::Zero(rows, cols);
    st.L2_1 = CMat::Zero(rows, cols);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < d; ++i) st.L2_0(j, 1 + i) = val[j][i];
    st.L2_0(m, 0) = -1.0;
    for (int i = 0; i < d; ++i) st.L2_0(m, 1 + i) = 1.0;

    enum class RowKind { Plain, PairFirst, PairSecond, InPair };
    std::vector<RowKind> kinds(rows, RowKind::Plain);
    int row = m + 1;
    // xi_v (s - sigma_u) phi_u - xi_u (s - sigma_v) phi_v = 0
    auto couple = [&](int u, int v, RowKind kind) {
        st.L2_0(row, 1 + u) = -xi[v] * sg[u];
        st.L2_1(row, 1 + u) = xi[v];
        st.L2_0(row, 1 + v) = xi[u] * sg[v];
        st.L2_1(row, 1 + v) = -xi[u];
        kinds[row] = kind;
        ++row;
    };
    for (int i = 0; i + 1 < R; ++i) couple(i, i + 1, RowKind::Plain);
    if (R > 0 && P > 0) {
        couple(R - 1, R, RowKind::PairFirst);
        couple(R - 1, R + 1, RowKind::PairSecond);
    }
    for (int c = 0; c + 1 < P; ++c) {
        const int p = R + 2 * c, q = R + 2 * (c + 1);
        couple(p, q, RowKind::PairFirst);
        couple(p + 1, q + 1, RowKind::PairSecond);
    }
    if (R == 0 && P > 0) couple(d - 2, d - 1, RowKind::InPair);

    const cplx I(0.0, 1.0);
    CMat TL = CMat::Identity(rows, rows);
    for (int r = 0; r < rows; ++r) {
        if (kinds[r] == RowKind::PairFirst) {
            TL(r, r) = 1.0;
            TL(r, r + 1) = 1.0;
            TL(r + 1, r) = I;
            TL(r + 1, r + 1) = -I;
        } else if (kinds[r] == RowKind::InPair) {
            TL(r, r) = -I;
        }
    }
    CMat TRinv = CMat::Identity(cols, cols);
    for (int c = 0; c < P; ++c) {
        const int k = 1 + R + 2 * c;
        TRinv(k, k) = 0.5;
        TRinv(k, k + 1) = -0.5 * I;
        TRinv(k + 1, k) = 0.5;
        TRinv(k + 1, k + 1) = 0.5 * I;
    }
    st.L3_0 = take_real(TL * st.L2_0 * TRinv, "barycentric linearization");
    st.L3_1 = take_real(TL * st.L2_1 * TRinv, "barycentric linearization");
    st.eliminated = P > 0 ? R + 2 * (P - 1) : R - 1;
    return st;
}

ScalarLinearization strong_barycentric_linearization(const std::vector<cplx>& support,
                                                     const std::vector<cplx>& weights,
                                                     const std::vector<std::vector<cplx>>& values) {
    const BarycentricStages st = barycentric_stages(support, weights, values);
    const int m = static_cast<int>(values.size());
    const int d = static_cast<int>(support.size());
    const int q = 1 + st.eliminated;
    const RVec e = st.L3_0.row(m).transpose();
    RMat L0 = st.L3_0 - st.L3_0.col(q) * e.transpose();
    RMat L1 = st.L3_1 - st.L3_1.col(q) * e.transpose();

    std::vector<int> keep_cols;
    for (int c = 0; c < 1 + d; ++c)
        if (c != q) keep_cols.push_back(c);
    std::vector<int> dual_rows;
    for (int r = m + 1; r < L0.rows(); ++r) dual_rows.push_back(r);

    const int dt = d - 1;
    ScalarLinearization lin;
    lin.basis.c0 = RVec(dt);
    lin.basis.c1 = RVec(dt);
    lin.basis.C0 = RMat(dt, dt);
    lin.basis.C1 = RMat(dt, dt);
    for (int r = 0; r < dt; ++r) {
        lin.basis.c0(r) = L0(dual_rows[r], 0);
        lin.basis.c1(r) = L1(dual_rows[r], 0);
        for (int c = 0; c < dt; ++c) {
            lin.basis.C0(r, c) = L0(dual_rows[r], keep_cols[1 + c]);
            lin.basis.C1(r, c) = L1(dual_rows[r], keep_cols[1 + c]);
        }
    }
    for (int j = 0; j < m; ++j) {
        RVec a(dt);
        for (int c = 0; c < dt; ++c) a(c) = L0(j, keep_cols[1 + c]);
        lin.a.push_back(a);
        lin.alpha0.push_back(L0(j, 0));
        lin.alpha1.push_back(0.0);
        lin.alpha2.push_back(0.0);
    }
    return lin;
}

ScalarLinearization strong_barycentric_linearization(const BarycentricApproximant& r) {
    return strong_barycentric_linearization(r.support, r.weights, r.values);
}

DualBasis barycentric_dual_basis(const std::vector<cplx>& support, const std::vector<cplx>& weights) {
    return strong_barycentric_linearization(support, weights, {}).basis;
}

namespace {

void attach_coefficients(ScalarLinearization& lin, const RefitApproximant& r) {
    for (int j = 0; j < r.m(); ++j) {
        lin.a.push_back(r.basis.size() ? real_coefficients(r.basis, r.gamma[j]) : RVec(0));
        lin.alpha0.push_back(r.alpha0[j]);
        lin.alpha1.push_back(r.alpha1[j]);
        lin.alpha2.push_back(r.alpha2[j]);
    }
}

void allocate(DualBasis& b, int k) {
    b.c0 = RVec::Zero(k);
    b.c1 = RVec::Zero(k);
    b.C0 = RMat::Zero(k, k);
    b.C1 = RMat::Zero(k, k);
}

}  // namespace

ScalarLinearization partial_fraction_linearization(const RefitApproximant& r) {
    if (r.basis.kind != BasisKind::PartialFraction)
        throw ConfigError("partial_fraction_linearization: basis is not partial-fraction");
    const auto& mu = r.basis.poles;
    const int k = static_cast<int>(mu.size());
    for (int i = 0; i < k; ++i)
        for (int l = i + 1; l < k; ++l)
            if (mu[i] == mu[l]) throw ConfigError("partial_fraction_linearization: repeated poles");
    ScalarLinearization lin;
    allocate(lin.basis, k);
    for (int i = 0; i < k; ++i) {
        if (is_real(mu[i])) {
            lin.basis.c0(i) = r.basis.xi[i];
            lin.basis.C0(i, i) = mu[i].real();
            lin.basis.C1(i, i) = -1.0;
        } else {
            lin.basis.c0(i) = 2 * r.basis.xi[i];
            lin.basis.C0(i, i) = lin.basis.C0(i + 1, i + 1) = mu[i].real();
            lin.basis.C0(i, i + 1) = mu[i].imag();
            lin.basis.C0(i + 1, i) = -mu[i].imag();
            lin.basis.C1(i, i) = lin.basis.C1(i + 1, i + 1) = -1.0;
            ++i;
        }
    }
    attach_coefficients(lin, r);
    return lin;
}

ScalarLinearization inverse_newton_linearization(const RefitApproximant& r) {
    if (r.basis.kind != BasisKind::InverseNewton)
        throw ConfigError("inverse_newton_linearization: basis is not inverse-Newton");
    const auto& mu = r.basis.poles;
    const auto& xi = r.basis.xi;
    const int k = static_cast<int>(mu.size());
    for (int i = 0; i < k; ++i)
        for (int l = i + 1; l < k; ++l)
            if (mu[i] == mu[l]) throw ConfigError("inverse_newton_linearization: repeated poles");
    ScalarLinearization lin;
    allocate(lin.basis, k);
    int prev = -1;  // -1: constant function
    bool prev_pair = false;
    double prev_xi = 1.0;
    for (int i = 0; i < k; ++i) {
        const double rho = xi[i] / prev_xi;
        if (is_real(mu[i])) {
            if (prev < 0)
                lin.basis.c0(i) = rho;
            else
                lin.basis.C0(i, prev) = rho;
            lin.basis.C0(i, i) = mu[i].real();
            lin.basis.C1(i, i) = -1.0;
            prev = i;
            prev_xi = xi[i];
            continue;
        }
        if (!prev_pair) {
            if (prev < 0)
                lin.basis.c0(i) = 2 * rho;
            else
                lin.basis.C0(i, prev) = 2 * rho;
        } else {
            lin.basis.C0(i, prev) = rho;
            lin.basis.C0(i + 1, prev + 1) = rho;
        }
        lin.basis.C0(i, i) = lin.basis.C0(i + 1, i + 1) = mu[i].real();
        lin.basis.C0(i, i + 1) = mu[i].imag();
        lin.basis.C0(i + 1, i) = -mu[i].imag();
        lin.basis.C1(i, i) = lin.basis.C1(i + 1, i + 1) = -1.0;
        prev = i;
        prev_pair = true;
        prev_xi = xi[i];
        ++i;
    }
    attach_coefficients(lin, r);
    return lin;
}

ScalarLinearization linearize_refit(const RefitApproximant& r) {
    switch (r.basis.kind) {
        case BasisKind::PartialFraction: return partial_fraction_linearization(r);
        case BasisKind::InverseNewton: return inverse_newton_linearization(r);
        case BasisKind::Barycentric: {
            std::vector<std::vector<cplx>> coeffs = r.gamma;
            ScalarLinearization lin =
                strong_barycentric_linearization(r.basis.support, r.basis.weights, coeffs);
            for (int j = 0; j < r.m(); ++j) {
                lin.alpha0[j] += r.alpha0[j];
                lin.alpha1[j] = r.alpha1[j];
                lin.alpha2[j] = r.alpha2[j];
            }
            return lin;
        }
    }
    throw ConfigError("linearize_refit: unknown basis");
}

void multiply_by_s(ScalarLinearization& lin, int j) {
    if (j < 0 || j >= lin.m()) throw DimensionError("multiply_by_s: function index");
    if (lin.alpha2[j] != 0.0)
        throw ConfigError("multiply_by_s: quadratic term present, degree would exceed two");
    const double a0 = lin.alpha0[j], a1 = lin.alpha1[j];
    if (lin.dim() == 0) {
        lin.alpha0[j] = 0.0;
        lin.alpha1[j] = a0;
        lin.alpha2[j] = a1;
        return;
    }
    RVec u;
    try {
        u = DenseLU<double>(lin.basis.C1.transpose()).solve(lin.a[j]);
    } catch (const SingularError&) {
        throw SingularError("multiply_by_s: C1 is singular");
    }
    lin.alpha0[j] = -u.dot(lin.basis.c0);
    lin.alpha1[j] = a0 - u.dot(lin.basis.c1);
    lin.alpha2[j] = a1;
    lin.a[j] = -lin.basis.C0.transpose() * u;
}

CVec dual_basis_phi(const DualBasis& b, cplx s) {
    if (b.size() == 0) return CVec(0);
    const CMat C = b.C0.cast<cplx>() + s * b.C1.cast<cplx>();
    const CVec c = b.c0.cast<cplx>() + s * b.c1.cast<cplx>();
    try {
        return -DenseLU<cplx>(C).solve(c);
    } catch (const SingularError&) {
        throw PoleError("dual basis evaluated at a pole");
    }
}

cplx schur_complement_eval(const ScalarLinearization& lin, int j, cplx s) {
    if (j < 0 || j >= lin.m()) throw DimensionError("schur_complement_eval: function index");
    cplx v = lin.alpha0[j] + s * lin.alpha1[j] + s * s * lin.alpha2[j];
    if (lin.dim() == 0) return v;
    return v + lin.a[j].cast<cplx>().dot(dual_basis_phi(lin.basis, s));
}

RankReport dual_basis_rank(const DualBasis& b, const std::vector<cplx>& samples) {
    const int d = b.size();
    RankReport rep;
    rep.expected = d;
    if (d == 0) return rep;
    CMat inf(d, d + 1);
    inf.col(0) = b.c1.cast<cplx>();
    inf.rightCols(d) = b.C1.cast<cplx>();
    rep.rank_infinity = numeric_rank(inf);
    rep.min_rank_finite = d;
    for (cplx s : samples) {
        CMat M(d, d + 1);
        M.col(0) = b.c0.cast<cplx>() + s * b.c1.cast<cplx>();
        M.rightCols(d) = b.C0.cast<cplx>() + s * b.C1.cast<cplx>();
        rep.min_rank_finite = std::min(rep.min_rank_finite, numeric_rank(M));
    }
    return rep;
}

RMat RealBlockPencil::Ahat_block(int i) const {
    RMat B = RMat::Zero(n, n);
    for (int j = 0; j < m; ++j) B += a[j](i) * Aneg[j];
    return B;
}

RMat RealBlockPencil::dense_A() const {
    const int N = size();
    RMat A = RMat::Zero(N, N);
    A.topLeftCorner(n, n) = At0;
    for (int i = 0; i < dt; ++i) A.block(0, 2 * n + i * n, n, n) = Ahat_block(i);
    A.block(n, n, n, n) = -RMat::Identity(n, n);
    for (int r = 0; r < dt; ++r) {
        A.block(2 * n + r * n, 0, n, n) = basis.c0(r) * RMat::Identity(n, n);
        for (int c = 0; c < dt; ++c)
            A.block(2 * n + r * n, 2 * n + c * n, n, n) = basis.C0(r, c) * RMat::Identity(n, n);
    }
    return A;
}

RMat RealBlockPencil::dense_E() const {
    const int N = size();
    RMat E = RMat::Zero(N, N);
    E.topLeftCorner(n, n) = -At1;
    E.block(0, n, n, n) = -At2;
    E.block(n, 0, n, n) = -RMat::Identity(n, n);
    for (int r = 0; r < dt; ++r) {
        E.block(2 * n + r * n, 0, n, n) = -basis.c1(r) * RMat::Identity(n, n);
        for (int c = 0; c < dt; ++c)
            E.block(2 * n + r * n, 2 * n + c * n, n, n) = -basis.C1(r, c) * RMat::Identity(n, n);
    }
    return E;
}

CMat RealBlockPencil::R(cplx s) const {
    CMat out = At0.cast<cplx>() + s * At1.cast<cplx>() + s * s * At2.cast<cplx>();
    if (dt == 0) return out;
    const CVec phi = Phi(s);
    for (int j = 0; j < m; ++j) out += a[j].cast<cplx>().dot(phi) * Aneg[j].cast<cplx>();
    return out;
}

RMat RealBlockPencil::R_real(double s) const {
    RMat out = At0 + s * At1 + s * s * At2;
    if (dt == 0) return out;
    const CVec phi = Phi(cplx(s, 0.0));
    for (int j = 0; j < m; ++j) out += a[j].dot(phi.real()) * Aneg[j];
    return out;
}

RVec RealBlockPencil::apply_A(const RVec& x) const {
    if (x.size() != size()) throw DimensionError("apply_A: size");
    RVec y(size());
    const auto x0 = x.head(n);
    const auto x1 = x.segment(n, n);
    const Eigen::Map<const RMat> X2(x.data() + 2 * n, n, dt);
    RVec top = At0 * x0;
    for (int j = 0; j < m; ++j) top += Aneg[j] * (X2 * a[j]);
    y.head(n) = top;
    y.segment(n, n) = -x1;
    Eigen::Map<RMat> Y2(y.data() + 2 * n, n, dt);
    Y2 = x0 * basis.c0.transpose() + X2 * basis.C0.transpose();
    return y;
}

RVec RealBlockPencil::apply_E(const RVec& x) const {
    if (x.size() != size()) throw DimensionError("apply_E: size");
    RVec y(size());
    const auto x0 = x.head(n);
    const auto x1 = x.segment(n, n);
    const Eigen::Map<const RMat> X2(x.data() + 2 * n, n, dt);
    y.head(n) = -(At1 * x0 + At2 * x1);
    y.segment(n, n) = -x0;
    Eigen::Map<RMat> Y2(y.data() + 2 * n, n, dt);
    Y2 = -(x0 * basis.c1.transpose() + X2 * basis.C1.transpose());
    return y;
}

RealBlockPencil assemble_system_pencil(const SplitFormSystem& sys, const ScalarLinearization& lin) {
    sys.validate();
    lin.validate();
    if (sys.m() != lin.m())
        throw DimensionError("assemble_system_pencil: linearization carries a different number of functions");
    RealBlockPencil P;
    P.n = sys.n;
    P.m = sys.m();
    P.dt = sys.m() == 0 ? 0 : lin.dim();
    P.At0 = sys.A0;
    P.At1 = sys.A1;
    P.At2 = sys.A2;
    for (int j = 0; j < P.m; ++j) {
        P.At0 += lin.alpha0[j] * sys.Aneg[j];
        P.At1 += lin.alpha1[j] * sys.Aneg[j];
        P.At2 += lin.alpha2[j] * sys.Aneg[j];
    }
    P.Aneg = sys.Aneg;
    P.a = lin.a;
    if (P.m == 0) {
        P.basis.c0 = P.basis.c1 = RVec(0);
        P.basis.C0 = P.basis.C1 = RMat(0, 0);
    } else {
        P.basis = lin.basis;
    }
    return P;
}

void export_pencil(const RealBlockPencil& P, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_matrix_market((fs::path(dir) / "A.mtx").string(), P.dense_A());
    write_matrix_market((fs::path(dir) / "E.mtx").string(), P.dense_E());
    auto vec = [](const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    auto mat = [&](const RMat& M) {
        std::vector<std::vector<double>> rows;
        for (Eigen::Index r = 0; r < M.rows(); ++r) rows.push_back(vec(M.row(r).transpose()));
        return rows;
    };
    nlohmann::json j;
    j["format"] = "ratlin-pencil-1";
    j["equation"] = "-E x' + A x = b, b = e1 (x) b(t)";
    j["A"] = "A.mtx";
    j["E"] = "E.mtx";
    j["n"] = P.n;
    j["basis_dim"] = P.dt;
    j["m"] = P.m;
    j["state_blocks"] = {"x", "x'", "Phi (x) x"};
    j["c0"] = vec(P.basis.c0);
    j["c1"] = vec(P.basis.c1);
    j["C0"] = mat(P.basis.C0);
    j["C1"] = mat(P.basis.C1);
    for (const auto& a : P.a) j["a"].push_back(vec(a));
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

}  // namespace ratlin
