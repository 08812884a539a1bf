#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "ratlin/errors.hpp"
#include "ratlin/matrix_market.hpp"
#include "ratlin/pipeline.hpp"
#include "ratlin/timedomain.hpp"

namespace fs = std::filesystem;
using namespace ratlin;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNonconverged = 2, kDivergence = 3 };

struct RunConfig {
    std::string model = "beam";
    std::string system;  // manifest path for external matrices
    double fmin = 1.0, fmax = 1e4;
    int nz = 10000;
    double tol = 1e-13;
    std::string method = "aaa";
    std::string prep = "none";
    std::string scaling = "auto";
    std::string scheme = "cn";
    double dt = 1e-5, tmax = 0.02;
    double omega = 0.0;
    std::string init = "rest";
    std::uint64_t seed = 1;
    int n = 20;
    std::string out = "out";
};

SplitFormSystem load_system(const RunConfig& c) {
    if (!c.system.empty()) return load_system_matrix_market(c.system);
    if (c.n < 1) throw ConfigError("--n must be positive");
    return build_surrogate_system(parse_model(c.model), c.n, c.seed);
}

ApproxConfig approx_config(const RunConfig& c, int m) {
    ApproxConfig a;
    a.f_min = c.fmin;
    a.f_max = c.fmax;
    a.nz = c.nz;
    a.tol = c.tol;
    a.method = parse_method(c.method);
    a.seed = c.seed;
    const int p = parse_prep(c.prep);
    a.powers.assign(m, 0);
    if (p > 0) a.powers.back() = p;
    if (c.scaling == "set") a.scaling = ScaleKind::SetValued;
    else if (c.scaling == "weighted") a.scaling = ScaleKind::Weighted;
    else if (c.scaling != "auto") throw ConfigError("--scaling must be auto, set or weighted");
    return a;
}

void report(const Approximation& a) {
    std::cout << "method " << to_string(a.config.method) << "  d = " << a.aaa.degree()
              << "  stop = " << to_string(a.aaa.stop) << "  poles = " << a.poles.size();
    int unstable = 0;
    for (cplx p : a.poles) unstable += p.real() >= 0;
    std::cout << "  unstable = " << unstable << "  basis dim = " << a.lin.dim() << "\n";
    for (int j = 0; j < a.m(); ++j) std::cout << "  rms error g" << j + 1 << " = " << a.rms_error(j) << "\n";
}

int finish(const Approximation& a) {
    if (!a.converged()) {
        std::cerr << "warning: AAA did not reach the tolerance (" << to_string(a.aaa.stop) << ")\n";
        return kNonconverged;
    }
    return kOk;
}

int cmd_approximate(const RunConfig& c) {
    const auto sys = load_system(c);
    const auto a = approximate(sys, approx_config(c, sys.m()));
    fs::create_directories(c.out);
    write_approx_error_csv((fs::path(c.out) / "approx_error.csv").string(), a);
    write_approximant_json((fs::path(c.out) / "approximant.json").string(), a);
    report(a);
    return finish(a);
}

int cmd_poles(const RunConfig& c) {
    const auto sys = load_system(c);
    const auto a = approximate(sys, approx_config(c, sys.m()));
    fs::create_directories(c.out);
    write_poles_csv((fs::path(c.out) / "poles.csv").string(), a.poles);
    report(a);
    return finish(a);
}

int cmd_linearize(const RunConfig& c) {
    const auto sys = load_system(c);
    const auto a = approximate(sys, approx_config(c, sys.m()));
    const auto P = assemble_system_pencil(sys, a.lin);
    export_pencil(P, c.out);
    std::ofstream log(fs::path(c.out) / "schur_check.csv", std::ios::binary);
    log << "f,function,rel_residual\n";
    double worst = 0;
    const int stride = std::max(1, a.grid.pairs() / 20);
    char buf[128];
    for (int k = 0; k < a.grid.pairs(); k += stride) {
        const cplx z = a.grid.upper(k);
        for (int j = 0; j < a.m(); ++j) {
            const cplx r = a.eval(j, z);
            const double res = std::abs(schur_complement_eval(a.lin, j, z) - r) / std::max(1.0, std::abs(r));
            worst = std::max(worst, res);
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", a.grid.omega[k] / (2 * M_PI), j + 1, res);
            log << buf;
        }
    }
    report(a);
    std::cout << "pencil size " << P.size() << "  max Schur residual " << worst << "\n";
    return finish(a);
}

int cmd_simulate(const RunConfig& c) {
    const auto sys = load_system(c);
    const auto a = approximate(sys, approx_config(c, sys.m()));
    const auto P = assemble_system_pencil(sys, a.lin);
    if (!(c.dt > 0) || !(c.tmax > 0)) throw ConfigError("--dt and --tmax must be positive");

    SimulationOptions opt;
    opt.scheme = parse_scheme(c.scheme);
    opt.h = c.dt;
    opt.steps = std::lround(c.tmax / c.dt);

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    RVec v(P.n);
    for (int i = 0; i < P.n; ++i) v(i) = U(rng);

    RVec x0;
    if (c.omega > 0) {
        const auto hs = initial_state_harmonic(P, c.omega, v);
        x0 = hs.real;
        const double w = c.omega;
        const RVec b0 = v;
        const CVec xh = hs.xhat;
        opt.forcing = [b0, w](double t) { return RVec(b0 * std::cos(w * t)); };
        opt.reference = [xh, w](double t) {
            return RVec((xh * std::exp(cplx(0.0, w * t))).real());
        };
    } else if (c.init == "rest") {
        x0 = initial_state_rest(P, v);
    } else if (c.init == "zero") {
        x0 = RVec::Zero(P.size());
    } else {
        throw ConfigError("--init must be rest or zero");
    }
    report(a);
    fs::create_directories(c.out);
    const auto ts = simulate(P, x0, opt);
    ts.write_csv((fs::path(c.out) / "timeseries.csv").string());
    std::cout << "steps " << opt.steps << "  final norm " << ts.norm.back();
    if (!ts.err.empty()) std::cout << "  max error " << ts.max_err();
    std::cout << "\n";
    return finish(a);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ratlin: rational approximation, linearization and time integration"};
    app.set_config("--config", "", "INI/TOML configuration file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;
    app.add_option("--model", c.model, "beam or porous surrogate")->capture_default_str();
    app.add_option("--system", c.system, "JSON manifest with Matrix Market matrices (overrides --model)");
    app.add_option("--n", c.n, "surrogate size")->capture_default_str();
    app.add_option("--fmin", c.fmin, "lowest grid frequency in Hz")->capture_default_str();
    app.add_option("--fmax", c.fmax, "highest grid frequency in Hz")->capture_default_str();
    app.add_option("--nz", c.nz, "number of grid frequencies")->capture_default_str();
    app.add_option("--tol", c.tol, "AAA tolerance")->capture_default_str();
    app.add_option("--method", c.method, "aaa, aaa-ls, e-aaa, f-aaa, s-aaa, e-f-aaa, e-s-aaa")->capture_default_str();
    app.add_option("--prep", c.prep, "none, s or s2: divide the last function by s^p before AAA")->capture_default_str();
    app.add_option("--scaling", c.scaling, "auto, set or weighted")->capture_default_str();
    app.add_option("--scheme", c.scheme, "be or cn")->capture_default_str();
    app.add_option("--dt", c.dt, "time step")->capture_default_str();
    app.add_option("--tmax", c.tmax, "final time")->capture_default_str();
    app.add_option("--omega", c.omega, "angular forcing frequency; enables the harmonic start")->capture_default_str();
    app.add_option("--init", c.init, "rest or zero (without --omega)")->capture_default_str();
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
    app.add_option("--out", c.out, "output directory")->capture_default_str();

    int (*handler)(const RunConfig&) = nullptr;
    app.add_subcommand("approximate", "write approx_error.csv and approximant.json")
        ->callback([&] { handler = cmd_approximate; });
    app.add_subcommand("poles", "write poles.csv")->callback([&] { handler = cmd_poles; });
    app.add_subcommand("linearize", "write A.mtx, E.mtx, manifest.json and schur_check.csv")
        ->callback([&] { handler = cmd_linearize; });
    app.add_subcommand("simulate", "write timeseries.csv")->callback([&] { handler = cmd_simulate; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    try {
        return handler(c);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << " (step " << e.step() << ")\n";
        return kDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
}
