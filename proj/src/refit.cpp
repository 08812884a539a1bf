#include "ratlin/refit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ratlin/errors.hpp"
#include "ratlin/linalg.hpp"

namespace ratlin {

namespace {

constexpr double kSwitchCond = 1e12;
constexpr double kSimpleSeparation = 1e-10;

bool is_real(cplx z) { return z.imag() == 0.0; }

const std::vector<cplx>& nodes(const PoleBasis& b) {
    return b.kind == BasisKind::Barycentric ? b.support : b.poles;
}

// log of min over the (conjugate-closed) grid of |prod (z - mu_l)|, chain given by idx
double log_min_product(const std::vector<cplx>& chain, const SampleGrid& Z) {
    double best = std::numeric_limits<double>::infinity();
    for (cplx z : Z.points) {
        double acc = 0.0;
        for (cplx mu : chain) {
            const double d = std::abs(z - mu);
            if (d == 0.0) throw GridError("scaling_weights: pole coincides with a grid point");
            acc += std::log(d);
        }
        best = std::min(best, acc);
    }
    return best;
}

// chains of the inverse Newton basis, one per basis function
std::vector<std::vector<cplx>> newton_chains(const std::vector<cplx>& poles) {
    std::vector<std::vector<cplx>> chains(poles.size());
    std::vector<cplx> real_chain, up, down;
    std::size_t i = 0;
    for (; i < poles.size() && is_real(poles[i]); ++i) {
        real_chain.push_back(poles[i]);
        chains[i] = real_chain;
    }
    up = down = real_chain;
    for (; i + 1 < poles.size(); i += 2) {
        up.push_back(poles[i]);
        down.push_back(poles[i + 1]);
        chains[i] = up;
        chains[i + 1] = down;
    }
    return chains;
}

}  // namespace

std::string to_string(BasisKind k) {
    switch (k) {
        case BasisKind::Barycentric: return "barycentric";
        case BasisKind::PartialFraction: return "partial-fraction";
        case BasisKind::InverseNewton: return "inverse-newton";
    }
    return "unknown";
}

int PoleBasis::size() const { return static_cast<int>(nodes(*this).size()); }

void PoleBasis::validate() const {
    const auto& p = nodes(*this);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (is_real(p[i])) continue;
        if (p[i].imag() < 0 || i + 1 >= p.size() || p[i + 1] != std::conj(p[i]))
            throw ConfigError("PoleBasis: complex nodes must come as (mu, conj mu) with Im mu > 0");
        ++i;
    }
    if (kind == BasisKind::Barycentric) {
        if (weights.size() != support.size()) throw DimensionError("PoleBasis: weights size");
    } else {
        if (xi.size() != poles.size()) throw DimensionError("PoleBasis: xi size");
        for (double x : xi)
            if (!(x > 0)) throw ConfigError("PoleBasis: scaling weights must be positive");
    }
}

std::vector<cplx> RefitApproximant::poles() const {
    if (basis.kind != BasisKind::Barycentric) return basis.poles;
    BarycentricApproximant tmp;
    tmp.support = basis.support;
    tmp.weights = basis.weights;
    return barycentric_poles(tmp);
}

std::vector<cplx> order_conjugate(const std::vector<cplx>& pts) {
    std::vector<cplx> reals, out;
    std::vector<char> used(pts.size(), 0);
    for (cplx p : pts)
        if (is_real(p)) reals.push_back(p);
    out = reals;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (is_real(pts[i]) || pts[i].imag() < 0 || used[i]) continue;
        used[i] = 1;
        std::size_t best = pts.size();
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (used[k] || pts[k].imag() >= 0) continue;
            const double d = std::abs(pts[k] - std::conj(pts[i]));
            if (d < bestd) {
                bestd = d;
                best = k;
            }
        }
        if (best == pts.size() || bestd > 1e-8 * std::abs(pts[i]))
            throw ConfigError("order_conjugate: set is not closed under conjugation");
        used[best] = 1;
        out.push_back(pts[i]);
        out.push_back(std::conj(pts[i]));
    }
    for (std::size_t k = 0; k < pts.size(); ++k)
        if (!is_real(pts[k]) && pts[k].imag() < 0 && !used[k])
            throw ConfigError("order_conjugate: set is not closed under conjugation");
    return out;
}

std::vector<cplx> filter_poles(const std::vector<cplx>& poles, FilterMode mode) {
    std::vector<cplx> out;
    for (cplx p : order_conjugate(poles)) {
        if (p.real() < 0)
            out.push_back(p);
        else if (mode == FilterMode::Flip && p.real() > 0)
            out.emplace_back(-p.real(), p.imag());
    }
    return out;
}

std::vector<double> scaling_weights(const std::vector<cplx>& poles, const SampleGrid& Z,
                                    BasisKind kind) {
    std::vector<double> xi(poles.size());
    if (kind == BasisKind::PartialFraction) {
        for (std::size_t i = 0; i < poles.size(); ++i) xi[i] = std::exp(log_min_product({poles[i]}, Z));
    } else if (kind == BasisKind::InverseNewton) {
        const auto chains = newton_chains(poles);
        for (std::size_t i = 0; i < poles.size(); ++i) xi[i] = std::exp(log_min_product(chains[i], Z));
    } else {
        throw ConfigError("scaling_weights: barycentric basis has no scaling weights");
    }
    return xi;
}

PoleBasis make_pole_basis(const std::vector<cplx>& poles, const SampleGrid& Z, BasisKind kind) {
    PoleBasis b;
    b.kind = kind;
    b.poles = order_conjugate(poles);
    b.xi = scaling_weights(b.poles, Z, kind);
    for (double x : b.xi)
        if (!std::isfinite(x) || x == 0)
            throw ConfigError("scaling weights out of floating point range");
    b.validate();
    return b;
}

PoleBasis make_barycentric_basis(const BarycentricApproximant& r) {
    PoleBasis b;
    b.kind = BasisKind::Barycentric;
    const auto ordered = order_conjugate(r.support);
    for (cplx s : ordered) {
        const auto it = std::find(r.support.begin(), r.support.end(), s);
        b.support.push_back(s);
        b.weights.push_back(r.weights[it - r.support.begin()]);
    }
    b.validate();
    return b;
}

namespace {

// Sums term(i) with each conjugate pair added first, which keeps the result
// exactly conjugate symmetric.
template <class Term>
cplx paired_sum(const std::vector<cplx>& p, Term term) {
    cplx acc = 0.0;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        if (!is_real(p[i]) && i + 1 < static_cast<int>(p.size()) && p[i + 1] == std::conj(p[i])) {
            acc += term(i) + term(i + 1);
            ++i;
        } else {
            acc += term(i);
        }
    }
    return acc;
}

}  // namespace

CVec basis_functions(const PoleBasis& b, cplx s) {
    const int k = b.size();
    CVec phi(k);
    if (b.kind == BasisKind::PartialFraction) {
        for (int i = 0; i < k; ++i) {
            if (s == b.poles[i]) throw PoleError("basis_functions: s is a pole");
            phi(i) = b.xi[i] / (s - b.poles[i]);
        }
        return phi;
    }
    if (b.kind == BasisKind::InverseNewton) {
        // phi_i = (xi_i / xi_prev) phi_prev / (s - mu_i)
        int i = 0;
        cplx prev = 1.0;
        double prev_xi = 1.0;
        for (; i < k && is_real(b.poles[i]); ++i) {
            if (s == b.poles[i]) throw PoleError("basis_functions: s is a pole");
            phi(i) = prev * (b.xi[i] / prev_xi) / (s - b.poles[i]);
            prev = phi(i);
            prev_xi = b.xi[i];
        }
        cplx up = prev, down = prev;
        double up_xi = prev_xi;
        for (; i + 1 < k; i += 2) {
            if (s == b.poles[i] || s == b.poles[i + 1]) throw PoleError("basis_functions: s is a pole");
            const double ratio = b.xi[i] / up_xi;
            phi(i) = up * ratio / (s - b.poles[i]);
            phi(i + 1) = down * ratio / (s - b.poles[i + 1]);
            up = phi(i);
            down = phi(i + 1);
            up_xi = b.xi[i];
        }
        return phi;
    }
    cplx den = 0.0;
    for (int i = 0; i < k; ++i) {
        if (s == b.support[i]) {
            phi.setZero();
            phi(i) = 1.0;
            return phi;
        }
        phi(i) = b.weights[i] / (s - b.support[i]);
    }
    den = paired_sum(b.support, [&](int i) { return phi(i); });
    if (den == cplx(0.0)) throw PoleError("basis_functions: s is a pole");
    return phi / den;
}

RVec real_coefficients(const PoleBasis& b, const std::vector<cplx>& gamma) {
    const auto& p = nodes(b);
    if (gamma.size() != p.size()) throw DimensionError("real_coefficients: size");
    RVec a(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (is_real(p[i])) {
            a(i) = gamma[i].real();
        } else {
            a(i) = gamma[i].real();
            a(i + 1) = gamma[i].imag();
            ++i;
        }
    }
    return a;
}

std::vector<cplx> complex_coefficients(const PoleBasis& b, const RVec& a) {
    const auto& p = nodes(b);
    if (a.size() != static_cast<Eigen::Index>(p.size())) throw DimensionError("complex_coefficients: size");
    std::vector<cplx> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (is_real(p[i])) {
            g[i] = a(i);
        } else {
            g[i] = cplx(a(i), a(i + 1));
            g[i + 1] = cplx(a(i), -a(i + 1));
            ++i;
        }
    }
    return g;
}

namespace {

RefitApproximant refit_once(const std::vector<ScalarFunction>& targets, const SampleGrid& Z,
                            const PoleBasis& basis, bool extended) {
    basis.validate();
    const int N = Z.pairs();
    const int k = basis.size();
    const bool with_const = basis.kind != BasisKind::Barycentric;
    const int ncol = (with_const ? 1 : 0) + k + (extended ? 2 : 0);
    if (2 * N < 2 * (k + 1 + (extended ? 2 : 0))) throw GridError("ls_refit: grid too small for the basis");

    const auto& p = nodes(basis);
    CMat cols(N, ncol);
    for (int r = 0; r < N; ++r) {
        const cplx z = Z.upper(r);
        const CVec phi = basis_functions(basis, z);
        int c = 0;
        if (with_const) cols(r, c++) = 1.0;
        for (int i = 0; i < k; ++i) {
            if (is_real(p[i])) {
                cols(r, c++) = phi(i);
            } else {
                cols(r, c++) = phi(i) + phi(i + 1);
                cols(r, c++) = cplx(0, 1) * (phi(i) - phi(i + 1));
                ++i;
            }
        }
        if (extended) {
            cols(r, c++) = z;
            cols(r, c++) = z * z;
        }
    }
    RVec colscale(ncol);
    RMat M(2 * N, ncol);
    for (int c = 0; c < ncol; ++c) {
        double s = cols.col(c).cwiseAbs().maxCoeff();
        colscale(c) = s > 0 ? s : 1.0;
        M.col(c).head(N) = cols.col(c).real() / colscale(c);
        M.col(c).tail(N) = cols.col(c).imag() / colscale(c);
    }

    RefitApproximant out;
    out.basis = basis;
    out.extended = extended;
    out.polynomial_only = with_const && k == 0;
    for (const auto& g : targets) {
        RVec rhs(2 * N);
        for (int r = 0; r < N; ++r) {
            const cplx v = g(Z.upper(r));
            rhs(r) = v.real();
            rhs(N + r) = v.imag();
        }
        const LeastSquaresResult ls = least_squares_solve(M, rhs);
        out.rank_deficient = out.rank_deficient || ls.rank_deficient;
        out.cond = std::max(out.cond, ls.cond);
        const RVec x = ls.x.cwiseQuotient(colscale);
        int c = 0;
        out.alpha0.push_back(with_const ? x(c++) : 0.0);
        const RVec a = x.segment(c, k);
        c += k;
        out.gamma.push_back(complex_coefficients(basis, a));
        out.alpha1.push_back(extended ? x(c++) : 0.0);
        out.alpha2.push_back(extended ? x(c++) : 0.0);
    }

    double scale = 0;
    for (cplx q : p) scale = std::max(scale, std::abs(q));
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t l = i + 1; l < p.size(); ++l)
            if (std::abs(p[i] - p[l]) <= kSimpleSeparation * scale) out.poles_simple = false;
    return out;
}

}  // namespace

RefitApproximant ls_refit(const std::vector<ScalarFunction>& targets, const SampleGrid& Z,
                          const PoleBasis& basis, bool extended) {
    if (targets.empty()) throw ConfigError("ls_refit: no target functions");
    RefitApproximant r = refit_once(targets, Z, basis, extended);
    if (basis.kind == BasisKind::PartialFraction && r.cond > kSwitchCond && basis.size() > 0) {
        try {
            const PoleBasis in = make_pole_basis(basis.poles, Z, BasisKind::InverseNewton);
            RefitApproximant alt = refit_once(targets, Z, in, extended);
            alt.switched_basis = true;
            return alt;
        } catch (const ConfigError&) {
            // inverse Newton scaling not representable; keep partial fractions
        }
    }
    return r;
}

cplx eval_refit(const RefitApproximant& r, int j, cplx s) {
    if (j < 0 || j >= r.m()) throw DimensionError("eval_refit: function index");
    cplx v = r.alpha0[j] + s * r.alpha1[j] + s * s * r.alpha2[j];
    if (r.basis.size() == 0) return v;
    const CVec phi = basis_functions(r.basis, s);
    return v + paired_sum(nodes(r.basis), [&](int i) { return r.gamma[j][i] * phi(i); });
}

double grid_rms_error(const std::function<cplx(cplx)>& approx, const ScalarFunction& g,
                      const SampleGrid& Z) {
    double acc = 0.0;
    for (int k = 0; k < Z.pairs(); ++k) acc += std::norm(approx(Z.upper(k)) - g(Z.upper(k)));
    return std::sqrt(acc / Z.pairs());
}

}  // namespace ratlin
