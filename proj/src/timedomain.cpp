#include "ratlin/timedomain.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ratlin/errors.hpp"

namespace ratlin {

Scheme parse_scheme(const std::string& s) {
    if (s == "be" || s == "backward-euler") return Scheme::BackwardEuler;
    if (s == "cn" || s == "crank-nicolson") return Scheme::CrankNicolson;
    throw ConfigError("unknown scheme '" + s + "'");
}

std::string to_string(Scheme s) { return s == Scheme::BackwardEuler ? "backward-euler" : "crank-nicolson"; }

StructuredSolver::StructuredSolver(const RealBlockPencil& P, double shift) : P_(P), shift_(shift) {
    if (!std::isfinite(shift)) throw ConfigError("StructuredSolver: shift must be finite");
    if (P_.dt > 0) {
        try {
            C_.factor(P_.basis.C0 + shift * P_.basis.C1);
        } catch (const SingularError&) {
            throw SingularError("StructuredSolver: shift is a pole of the basis");
        }
        phi_ = -C_.solve(RVec(P_.basis.c0 + shift * P_.basis.c1));
    }
    try {
        R_.factor(P_.R_real(shift));
    } catch (const SingularError&) {
        throw SingularError("StructuredSolver: R(s*) is singular");
    }
}

RVec StructuredSolver::solve(const RVec& f) const {
    const int n = P_.n, dt = P_.dt;
    if (f.size() != P_.size()) throw DimensionError("StructuredSolver::solve: size");
    const double s = shift_;
    const auto f0 = f.head(n);
    const auto f1 = f.segment(n, n);

    // Y = F2 C^{-T}, i.e. y = (C^{-1} (x) I) f2
    RMat Y(n, dt);
    if (dt > 0) {
        const Eigen::Map<const RMat> F2(f.data() + 2 * n, n, dt);
        Y = C_.solve(RMat(F2.transpose())).transpose();
    }
    RVec rhs = f0 + s * (P_.At2 * f1);
    for (int j = 0; j < P_.m; ++j) rhs -= P_.Aneg[j] * (Y * P_.a[j]);
    const RVec w0 = R_.solve(rhs);

    RVec w(P_.size());
    w.head(n) = w0;
    w.segment(n, n) = s * w0 - f1;
    if (dt > 0) {
        Eigen::Map<RMat> W2(w.data() + 2 * n, n, dt);
        W2 = Y + w0 * phi_.transpose();
    }
    return w;
}

RVec StructuredSolver::apply(const RVec& b, const RVec& v) const { return solve(b + P_.apply_E(v)); }

StructuredSolver ul_factorize(const RealBlockPencil& P, double h, Scheme scheme) {
    if (!(h > 0)) throw ConfigError("ul_factorize: step must be positive");
    return StructuredSolver(P, scheme == Scheme::BackwardEuler ? 1.0 / h : 2.0 / h);
}

namespace {

RVec lift(const RealBlockPencil& P, const RVec& b) {
    RVec out = RVec::Zero(P.size());
    if (b.size() != P.n) throw DimensionError("forcing must have size n");
    out.head(P.n) = b;
    return out;
}

}  // namespace

RVec step(const StructuredSolver& S, Scheme scheme, double h, const RVec& xk, double tk,
          const Forcing& b) {
    const RealBlockPencil& P = S.pencil();
    const double expected = scheme == Scheme::BackwardEuler ? 1.0 / h : 2.0 / h;
    if (std::abs(S.shift() - expected) > 1e-12 * std::abs(expected))
        throw ConfigError("step: solver was factorized for a different scheme or step");
    const RVec zero = RVec::Zero(P.n);
    if (scheme == Scheme::BackwardEuler) {
        const RVec bn = b ? lift(P, b(tk + h)) : lift(P, zero);
        return S.apply(bn, -xk / h);
    }
    RVec bs = b ? lift(P, RVec(b(tk + h) + b(tk))) : lift(P, zero);
    return S.apply(bs, -(4.0 / h) * xk) - xk;
}

HarmonicState initial_state_harmonic(const RealBlockPencil& P, double omega, const RVec& b0) {
    if (b0.size() != P.n) throw DimensionError("initial_state_harmonic: b0 size");
    const cplx s(0.0, omega);
    HarmonicState hs;
    try {
        hs.xhat = DenseLU<cplx>(P.R(s)).solve(CVec(b0.cast<cplx>()));
    } catch (const SingularError&) {
        throw SingularError("initial_state_harmonic: R(i w) singular (resonance)");
    }
    hs.complex = CVec(P.size());
    hs.complex.head(P.n) = hs.xhat;
    hs.complex.segment(P.n, P.n) = s * hs.xhat;
    if (P.dt > 0) {
        const CVec phi = P.Phi(s);
        Eigen::Map<CMat> X2(hs.complex.data() + 2 * P.n, P.n, P.dt);
        X2 = hs.xhat * phi.transpose();
    }
    hs.real = hs.complex.real();
    return hs;
}

RVec initial_state_rest(const RealBlockPencil& P, const RVec& x0) {
    if (x0.size() != P.n) throw DimensionError("initial_state_rest: x0 size");
    RVec x = RVec::Zero(P.size());
    x.head(P.n) = x0;
    if (P.dt > 0) {
        CVec phi;
        try {
            phi = P.Phi(0.0);
        } catch (const PoleError&) {
            throw PoleError("initial_state_rest: the basis has a pole at the origin");
        }
        Eigen::Map<RMat> X2(x.data() + 2 * P.n, P.n, P.dt);
        X2 = x0 * phi.real().transpose();
    }
    return x;
}

RVec initial_state_history(const RealBlockPencil& P, const std::function<RVec(double)>& x,
                           const std::function<RVec(double)>& xdot, double T, int steps) {
    if (!(T > 0) || steps < 1) throw ConfigError("initial_state_history: need T > 0 and steps >= 1");
    const int n = P.n, dt = P.dt;
    const double h = T / steps;
    auto deriv = [&](double t) -> RVec {
        if (xdot) return xdot(t);
        const double d = 1e-6 * std::max(1.0, T);
        return (x(t + d) - x(t - d)) / (2 * d);
    };
    RVec out = RVec::Zero(P.size());
    out.head(n) = x(0.0);
    out.segment(n, n) = deriv(0.0);
    if (dt == 0) return out;

    // C1 X' + C0 X = -(c0 x^T + c1 x'^T),  X = X2^T (dt x n)
    const RMat& C0 = P.basis.C0;
    const RMat& C1 = P.basis.C1;
    DenseLU<double> lhs(RMat(C1 + 0.5 * h * C0));
    const RMat rhsM = C1 - 0.5 * h * C0;
    auto F = [&](double t) -> RMat {
        return P.basis.c0 * x(t).transpose() + P.basis.c1 * deriv(t).transpose();
    };
    RMat X = RMat::Zero(dt, n);
    RMat Fk = F(-T);
    for (int k = 0; k < steps; ++k) {
        const double t1 = -T + (k + 1) * h;
        const RMat Fn = F(t1);
        X = lhs.solve(RMat(rhsM * X - 0.5 * h * (Fn + Fk)));
        Fk = Fn;
    }
    Eigen::Map<RMat> X2(out.data() + 2 * n, n, dt);
    X2 = X.transpose();
    return out;
}

double TimeSeries::max_norm() const {
    double m = 0;
    for (double v : norm) m = std::max(m, v);
    return m;
}

double TimeSeries::max_err() const {
    double m = 0;
    for (double v : err) m = std::max(m, v);
    return m;
}

void TimeSeries::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    const bool with_err = !err.empty();
    out << (with_err ? "t,norm,err\n" : "t,norm\n");
    char buf[128];
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (with_err)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t[k], norm[k], err[k]);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t[k], norm[k]);
        out << buf;
    }
}

TimeSeries simulate(const RealBlockPencil& P, const RVec& x0, const SimulationOptions& opt) {
    if (x0.size() != P.size()) throw DimensionError("simulate: initial state size");
    if (!(opt.h > 0) || opt.steps < 0) throw ConfigError("simulate: need h > 0 and steps >= 0");
    const StructuredSolver S = ul_factorize(P, opt.h, opt.scheme);
    TimeSeries ts;
    RVec x = x0;
    auto record = [&](double t) {
        ts.t.push_back(t);
        ts.norm.push_back(x.head(P.n).norm());
        if (opt.reference) ts.err.push_back((x.head(P.n) - opt.reference(t)).norm());
        if (opt.keep_states) ts.states.push_back(x);
    };
    record(0.0);
    double scale = x.head(P.n).norm();
    for (long k = 0; k < opt.steps; ++k) {
        const double tk = k * opt.h;
        x = step(S, opt.scheme, opt.h, x, tk, opt.forcing);
        const double nx = x.head(P.n).norm();
        if (!x.allFinite()) throw DivergenceError("simulate: nonfinite state", k + 1);
        if (k == 0) scale = std::max(scale, nx);
        if (scale > 0 && nx > opt.divergence_factor * scale)
            throw DivergenceError("simulate: state norm exceeded the divergence guard", k + 1);
        if (scale == 0) scale = nx;
        record((k + 1) * opt.h);
    }
    return ts;
}

}  // namespace ratlin
