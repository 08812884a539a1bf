#pragma once

#include <optional>
#include <string>

#include "ratlin/linalg.hpp"
#include "ratlin/linearize.hpp"

namespace ratlin {

enum class Scheme { BackwardEuler, CrankNicolson };
Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);

/// Solves (A - shift E) w = f for a block pencil with one n x n LU of
/// R(shift) and block updates for the remaining unknowns.
class StructuredSolver {
public:
    StructuredSolver(const RealBlockPencil& P, double shift);

    RVec solve(const RVec& f) const;
    /// (A - shift E)^{-1} (b + E v)
    RVec apply(const RVec& b, const RVec& v) const;

    double shift() const { return shift_; }
    const RealBlockPencil& pencil() const { return P_; }

private:
    RealBlockPencil P_;
    double shift_;
    DenseLU<double> R_;
    DenseLU<double> C_;  // C0 + shift C1 (transposed use)
    RVec phi_;           // Phi(shift)
};

/// The implicit matrix of -E x' + A x = b is A - s* E with s* = 1/h (BE) or
/// 2/h (CN).
StructuredSolver ul_factorize(const RealBlockPencil& P, double h, Scheme scheme);

using Forcing = std::function<RVec(double)>;  // physical n-vector b(t)

/// One step from (t_k, x_k) to t_k + h.
RVec step(const StructuredSolver& S, Scheme scheme, double h, const RVec& xk, double tk,
          const Forcing& b);

/// Re(Phi(i w) (x) xh) with R(i w) xh = b0; also returns the complex state.
struct HarmonicState {
    RVec real;
    CVec complex;
    CVec xhat;
};
HarmonicState initial_state_harmonic(const RealBlockPencil& P, double omega, const RVec& b0);

RVec initial_state_rest(const RealBlockPencil& P, const RVec& x0);

/// Integrates the Phi-block history equation from -T to 0 with CN.
/// xdot may be empty, then a centered difference is used.
RVec initial_state_history(const RealBlockPencil& P, const std::function<RVec(double)>& x,
                           const std::function<RVec(double)>& xdot, double T, int steps);

struct TimeSeries {
    std::vector<double> t;
    std::vector<double> norm;
    std::vector<double> err;          // empty without reference
    std::vector<RVec> states;         // optional full states

    double max_norm() const;
    double max_err() const;
    void write_csv(const std::string& path) const;
};

struct SimulationOptions {
    Scheme scheme = Scheme::CrankNicolson;
    double h = 1e-5;
    long steps = 0;
    Forcing forcing;                                   // empty: b = 0
    std::function<RVec(double)> reference;             // exact physical x(t), optional
    bool keep_states = false;
    double divergence_factor = 1e12;
};

/// Fixed step march of -E x' + A x = e1 (x) b(t).  Throws DivergenceError on
/// nonfinite or runaway states.
TimeSeries simulate(const RealBlockPencil& P, const RVec& x0, const SimulationOptions& opt);

}  // namespace ratlin
