#include "ratlin/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "ratlin/errors.hpp"

namespace ratlin {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace

RMat read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw FormatError(path + ": empty file");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw FormatError(path + ": missing %%MatrixMarket matrix header");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format != "coordinate" && format != "array") throw FormatError(path + ": unknown format " + format);
    if (field != "real" && field != "integer" && field != "double")
        throw FormatError(path + ": only real matrices are supported");
    if (symmetry != "general" && symmetry != "symmetric")
        throw FormatError(path + ": unsupported symmetry " + symmetry);
    const bool sym = symmetry == "symmetric";

    std::string line;
    if (!next_data_line(in, line)) throw FormatError(path + ": missing size line");
    std::istringstream ss(line);
    long rows = 0, cols = 0, nnz = 0;
    ss >> rows >> cols;
    if (format == "coordinate") ss >> nnz;
    if (!ss || rows <= 0 || cols <= 0 || nnz < 0) throw FormatError(path + ": bad size line");
    if (sym && rows != cols) throw FormatError(path + ": symmetric matrix must be square");

    RMat M = RMat::Zero(rows, cols);
    if (format == "coordinate") {
        for (long k = 0; k < nnz; ++k) {
            if (!next_data_line(in, line)) throw FormatError(path + ": truncated entries");
            std::istringstream es(line);
            long i = 0, j = 0;
            double v = 0;
            es >> i >> j >> v;
            if (!es || i < 1 || j < 1 || i > rows || j > cols) throw FormatError(path + ": bad entry");
            M(i - 1, j - 1) += v;
            if (sym && i != j) M(j - 1, i - 1) += v;
        }
    } else {
        // column-major; symmetric stores the lower triangle
        for (long j = 0; j < cols; ++j) {
            for (long i = sym ? j : 0; i < rows; ++i) {
                if (!next_data_line(in, line)) throw FormatError(path + ": truncated entries");
                std::istringstream es(line);
                double v = 0;
                es >> v;
                if (!es) throw FormatError(path + ": bad entry");
                M(i, j) = v;
                if (sym) M(j, i) = v;
            }
        }
    }
    return M;
}

void write_matrix_market(const std::string& path, const RMat& M, bool symmetric) {
    if (symmetric && M.rows() != M.cols()) throw DimensionError("write_matrix_market: not square");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    std::vector<std::tuple<long, long, double>> entries;
    for (long j = 0; j < M.cols(); ++j)
        for (long i = symmetric ? j : 0; i < M.rows(); ++i)
            if (M(i, j) != 0.0) entries.emplace_back(i + 1, j + 1, M(i, j));
    out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
    out << M.rows() << " " << M.cols() << " " << entries.size() << "\n";
    out << std::setprecision(17);
    for (const auto& [i, j, v] : entries) out << i << " " << j << " " << v << "\n";
}

ScalarFunction builtin_function(const std::string& name) {
    if (name == "beam_g1") return [](cplx s) { return beam_g1(s); };
    if (name == "porous_g1") return [](cplx s) { return porous_g1(s); };
    if (name == "porous_s2g2") return [](cplx s) { return porous_g2_prep(s, 0); };
    if (name == "porous_sg2") return [](cplx s) { return porous_g2_prep(s, 1); };
    if (name == "porous_g2") return [](cplx s) { return porous_g2(s); };
    throw ConfigError("unknown function '" + name + "'");
}

SplitFormSystem load_system_matrix_market(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw FormatError("cannot open " + manifest_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(manifest_path + ": " + e.what());
    }
    const fs::path base = fs::path(manifest_path).parent_path();
    auto load = [&](const std::string& rel) { return read_matrix_market((base / rel).string()); };

    SplitFormSystem sys;
    try {
        sys.A0 = load(j.at("A0").get<std::string>());
        if (sys.A0.rows() != sys.A0.cols()) throw DimensionError("A0 must be square");
        sys.n = static_cast<int>(sys.A0.rows());
        sys.A1 = j.contains("A1") ? load(j["A1"].get<std::string>()) : RMat::Zero(sys.n, sys.n);
        sys.A2 = j.contains("A2") ? load(j["A2"].get<std::string>()) : RMat::Zero(sys.n, sys.n);
        if (j.contains("terms")) {
            for (const auto& t : j["terms"]) {
                sys.Aneg.push_back(load(t.at("matrix").get<std::string>()));
                const auto fname = t.at("function").get<std::string>();
                sys.g.push_back(builtin_function(fname));
                sys.names.push_back(fname);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(manifest_path + ": " + e.what());
    }
    try {
        sys.validate();
    } catch (const DimensionError& e) {
        throw DimensionError(manifest_path + ": dimension mismatch across files (" + e.what() + ")");
    }
    return sys;
}

}  // namespace ratlin
