#include "ratlin/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "ratlin/errors.hpp"

namespace ratlin {

Method parse_method(const std::string& s) {
    if (s == "aaa") return Method::AAA;
    if (s == "aaa-ls") return Method::AAA_LS;
    if (s == "e-aaa") return Method::E_AAA;
    if (s == "f-aaa") return Method::F_AAA;
    if (s == "s-aaa") return Method::S_AAA;
    if (s == "e-f-aaa") return Method::E_F_AAA;
    if (s == "e-s-aaa") return Method::E_S_AAA;
    throw ConfigError("unknown method '" + s + "'");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::AAA: return "aaa";
        case Method::AAA_LS: return "aaa-ls";
        case Method::E_AAA: return "e-aaa";
        case Method::F_AAA: return "f-aaa";
        case Method::S_AAA: return "s-aaa";
        case Method::E_F_AAA: return "e-f-aaa";
        case Method::E_S_AAA: return "e-s-aaa";
    }
    return "?";
}

bool is_extended(Method m) { return m == Method::E_AAA || m == Method::E_F_AAA || m == Method::E_S_AAA; }

int parse_prep(const std::string& s) {
    if (s == "none" || s == "0") return 0;
    if (s == "s" || s == "g2/s" || s == "1") return 1;
    if (s == "s2" || s == "g2/s2" || s == "g2/s^2" || s == "2") return 2;
    throw ConfigError("unknown preprocessing '" + s + "'");
}

void ApproxConfig::validate() const {
    if (!(f_min > 0) || !(f_max > f_min)) throw ConfigError("need 0 < fmin < fmax");
    if (nz < 2) throw ConfigError("nz must be at least 2");
    if (!(tol > 0)) throw ConfigError("tol must be positive");
    if (d_max < 0) throw ConfigError("d_max must be nonnegative");
    for (int p : powers)
        if (p < 0 || p > 2) throw ConfigError("preprocessing power must be 0, 1 or 2");
}

cplx Approximation::eval(int j, cplx s) const {
    if (j < 0 || j >= m()) throw DimensionError("Approximation::eval: function index");
    const cplx sp = std::pow(s, powers[j]);
    if (!refit) return sp * eval_barycentric(aaa, j, s);
    if (refit_on_drivers) return sp * eval_refit(*refit, j, s);
    return eval_refit(*refit, j, s);
}

double Approximation::rms_error(int j) const {
    return grid_rms_error([&](cplx s) { return eval(j, s); }, targets[j], grid);
}

Approximation approximate(const SplitFormSystem& sys, const ApproxConfig& cfg) {
    cfg.validate();
    sys.validate();
    const int m = sys.m();
    if (m == 0) throw ConfigError("approximate: system has no nonlinear terms");
    Approximation out;
    out.config = cfg;
    out.grid = log_imaginary_grid(cfg.f_min, cfg.f_max, cfg.nz);
    out.targets = sys.g;
    out.powers = cfg.powers.empty() ? std::vector<int>(m, 0) : cfg.powers;
    if (static_cast<int>(out.powers.size()) != m) throw ConfigError("approximate: one power per function");
    for (int j = 0; j < m; ++j) {
        const int p = out.powers[j];
        const ScalarFunction g = sys.g[j];
        out.drivers.push_back(p == 0 ? g : ScalarFunction([g, p](cplx s) { return g(s) / std::pow(s, p); }));
    }

    const ScaleKind kind = cfg.scaling.value_or(m == 1 ? ScaleKind::SetValued : ScaleKind::Weighted);
    const FunctionSet fs = kind == ScaleKind::Weighted
                               ? make_weighted(sys, cfg.seed, out.drivers, out.powers)
                               : make_set_valued(out.drivers);
    const int d_max = cfg.d_max > 0 ? cfg.d_max : std::min(80, cfg.nz - 1);
    out.aaa = real_aaa(fs, out.grid, cfg.tol, d_max);
    out.aaa_poles = barycentric_poles(out.aaa);

    const bool ext = is_extended(cfg.method);
    switch (cfg.method) {
        case Method::AAA: {
            out.lin = strong_barycentric_linearization(out.aaa);
            out.poles = out.aaa_poles;
            break;
        }
        case Method::AAA_LS:
        case Method::E_AAA: {
            out.refit_on_drivers = !ext;
            out.refit = ls_refit(ext ? out.targets : out.drivers, out.grid, make_barycentric_basis(out.aaa), ext);
            out.poles = out.refit->poles();
            break;
        }
        default: {
            const bool flip = cfg.method == Method::S_AAA || cfg.method == Method::E_S_AAA;
            const auto kept = filter_poles(out.aaa_poles, flip ? FilterMode::Flip : FilterMode::Drop);
            out.refit_on_drivers = !ext;
            out.refit = ls_refit(ext ? out.targets : out.drivers, out.grid,
                                 make_pole_basis(kept, out.grid, cfg.pole_basis), ext);
            out.poles = out.refit->poles();
            break;
        }
    }
    if (out.refit) out.lin = linearize_refit(*out.refit);
    const bool on_drivers = !out.refit || out.refit_on_drivers;
    if (on_drivers)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < out.powers[j]; ++k) multiply_by_s(out.lin, j);
    return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    return out;
}

}  // namespace

void write_approx_error_csv(const std::string& path, const Approximation& a) {
    auto out = open_out(path);
    out << "f";
    for (int j = 0; j < a.m(); ++j) out << ",abs_g" << j + 1 << ",err_g" << j + 1;
    out << "\n";
    char buf[64];
    for (int k = 0; k < a.grid.pairs(); ++k) {
        const cplx z = a.grid.upper(k);
        std::snprintf(buf, sizeof buf, "%.17g", a.grid.omega[k] / (2 * M_PI));
        out << buf;
        for (int j = 0; j < a.m(); ++j) {
            const cplx g = a.targets[j](z);
            std::snprintf(buf, sizeof buf, ",%.17g", std::abs(g));
            out << buf;
            std::snprintf(buf, sizeof buf, ",%.17g", std::abs(g - a.eval(j, z)));
            out << buf;
        }
        out << "\n";
    }
}

void write_poles_csv(const std::string& path, const std::vector<cplx>& poles) {
    auto out = open_out(path);
    out << "re,im,stable\n";
    char buf[96];
    for (cplx p : poles) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", p.real(), p.imag(), p.real() < 0 ? 1 : 0);
        out << buf;
    }
}

void write_approximant_json(const std::string& path, const Approximation& a) {
    using nlohmann::json;
    auto cl = [](const std::vector<cplx>& v) {
        json arr = json::array();
        for (cplx z : v) arr.push_back({z.real(), z.imag()});
        return arr;
    };
    json j;
    j["format"] = "ratlin-approximant-1";
    j["method"] = to_string(a.config.method);
    j["grid"] = {{"f_min", a.config.f_min}, {"f_max", a.config.f_max}, {"nz", a.config.nz}};
    j["tol"] = a.config.tol;
    j["powers"] = a.powers;
    j["aaa"]["degree"] = a.aaa.degree();
    j["aaa"]["converged"] = a.aaa.converged;
    j["aaa"]["stop"] = to_string(a.aaa.stop);
    j["aaa"]["support"] = cl(a.aaa.support);
    j["aaa"]["weights"] = cl(a.aaa.weights);
    for (const auto& v : a.aaa.values) j["aaa"]["values"].push_back(cl(v));
    j["aaa"]["poles"] = cl(a.aaa_poles);
    if (a.refit) {
        const auto& r = *a.refit;
        json& jr = j["refit"];
        jr["basis"] = to_string(r.basis.kind);
        jr["targets"] = a.refit_on_drivers ? "drivers" : "functions";
        jr["extended"] = r.extended;
        jr["poles"] = cl(r.basis.poles);
        jr["xi"] = r.basis.xi;
        jr["support"] = cl(r.basis.support);
        jr["weights"] = cl(r.basis.weights);
        for (const auto& g : r.gamma) jr["gamma"].push_back(cl(g));
        jr["alpha0"] = r.alpha0;
        jr["alpha1"] = r.alpha1;
        jr["alpha2"] = r.alpha2;
        jr["cond"] = std::isfinite(r.cond) ? json(r.cond) : json("inf");
        jr["rank_deficient"] = r.rank_deficient;
        jr["switched_basis"] = r.switched_basis;
    }
    j["poles"] = cl(a.poles);
    j["linearization_dim"] = a.lin.dim();
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

}  // namespace ratlin
