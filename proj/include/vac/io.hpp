#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vac/basis.hpp"
#include "vac/trajectory.hpp"
#include "vac/vac_core.hpp"

namespace vac {

using json = nlohmann::json;

// Shortest round-trippable decimal form.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- trajectory files -------------------------------------------------------
// CSV: "# dim=<d> delta=<delta>" header, one state per row.
// Binary: "VACTRAJ1" magic, int64 dim, double delta, int64 count, row-major
// doubles.

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "# dim=" << traj.dim() << " delta=" << format_double(traj.delta()) << "\n";
    for (Eigen::Index s = 0; s < traj.count(); ++s) {
        for (Eigen::Index d = 0; d < traj.dim(); ++d) {
            if (d) os << ",";
            os << format_double(traj.states()(s, d));
        }
        os << "\n";
    }
}

inline Trajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# dim=", 0) != 0)
        throw std::invalid_argument("trajectory csv: missing '# dim=<d> delta=<v>' header");
    Eigen::Index dim = 0;
    double delta = 0.0;
    if (std::sscanf(line.c_str(), "# dim=%td delta=%lf", &dim, &delta) != 2)
        throw std::invalid_argument("trajectory csv: malformed header");
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream row(line);
        double v;
        Eigen::Index got = 0;
        while (row >> v) {
            values.push_back(v);
            ++got;
        }
        if (got != dim) throw std::invalid_argument("trajectory csv: row width != dim");
    }
    Eigen::Index count = static_cast<Eigen::Index>(values.size()) / dim;
    Eigen::MatrixXd states(count, dim);
    for (Eigen::Index s = 0; s < count; ++s)
        for (Eigen::Index d = 0; d < dim; ++d) states(s, d) = values[s * dim + d];
    return Trajectory(std::move(states), delta);
}

inline void write_trajectory_binary(std::ostream& os, const Trajectory& traj) {
    os.write("VACTRAJ1", 8);
    std::int64_t dim = traj.dim(), count = traj.count();
    double delta = traj.delta();
    os.write(reinterpret_cast<const char*>(&dim), 8);
    os.write(reinterpret_cast<const char*>(&delta), 8);
    os.write(reinterpret_cast<const char*>(&count), 8);
    for (Eigen::Index s = 0; s < count; ++s)
        for (Eigen::Index d = 0; d < dim; ++d) {
            double v = traj.states()(s, d);
            os.write(reinterpret_cast<const char*>(&v), 8);
        }
}

inline Trajectory read_trajectory_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != "VACTRAJ1")
        throw std::invalid_argument("trajectory binary: bad magic");
    std::int64_t dim = 0, count = 0;
    double delta = 0.0;
    is.read(reinterpret_cast<char*>(&dim), 8);
    is.read(reinterpret_cast<char*>(&delta), 8);
    is.read(reinterpret_cast<char*>(&count), 8);
    Eigen::MatrixXd states(count, dim);
    for (Eigen::Index s = 0; s < count; ++s)
        for (Eigen::Index d = 0; d < dim; ++d) {
            double v;
            is.read(reinterpret_cast<char*>(&v), 8);
            states(s, d) = v;
        }
    if (!is) throw std::invalid_argument("trajectory binary: truncated file");
    return Trajectory(std::move(states), delta);
}

inline void save_trajectory(const std::string& path, const Trajectory& traj) {
    bool binary = path.size() >= 4 && path.substr(path.size() - 4) == ".bin";
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    binary ? write_trajectory_binary(os, traj) : write_trajectory_csv(os, traj);
}

inline Trajectory load_trajectory(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[8] = {};
    is.read(magic, 8);
    is.seekg(0);
    if (std::string(magic, 8) == "VACTRAJ1") return read_trajectory_binary(is);
    return read_trajectory_csv(is);
}

// --- JSON forms -------------------------------------------------------------

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(i, c));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    Eigen::Index rows = j.at("rows"), cols = j.at("cols");
    const json& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::invalid_argument("matrix json: size mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[i * cols + c];
    return m;
}

inline json basis_to_json(const BasisSet& basis) {
    json j;
    j["n"] = basis.size();
    switch (basis.kind()) {
        case BasisSet::Kind::Indicator1d: {
            j["kind"] = "indicator-1d";
            json b = json::array();
            for (Eigen::Index i = 0; i < basis.boundaries().size(); ++i)
                b.push_back(basis.boundaries()[i]);
            j["boundaries"] = b;
            break;
        }
        case BasisSet::Kind::Polynomial2d: {
            j["kind"] = "polynomial-2d";
            json e = json::array();
            for (const auto& p : basis.exponents()) e.push_back({p[0], p[1]});
            j["exponents"] = e;
            break;
        }
        case BasisSet::Kind::Custom:
            throw std::invalid_argument("basis json: custom bases are not serializable");
    }
    return j;
}

inline BasisSet basis_from_json(const json& j) {
    std::string kind = j.at("kind");
    if (kind == "indicator-1d") {
        const json& b = j.at("boundaries");
        Eigen::VectorXd q(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) q[static_cast<Eigen::Index>(i)] = b[i];
        return BasisSet::indicator(std::move(q));
    }
    if (kind == "polynomial-2d") {
        std::vector<std::array<int, 2>> exps;
        for (const auto& p : j.at("exponents")) exps.push_back({p.at(0), p.at(1)});
        return BasisSet::polynomial2d(std::move(exps));
    }
    throw std::invalid_argument("basis json: unknown kind " + kind);
}

inline json correlation_pair_to_json(const CorrelationPair& pair) {
    return json{{"tau", pair.tau},
                {"c0", matrix_to_json(pair.c0)},
                {"ctau", matrix_to_json(pair.ctau)},
                {"meta",
                 {{"duration", pair.meta.duration},
                  {"delta", pair.meta.delta},
                  {"basis", pair.meta.basis}}}};
}

inline CorrelationPair correlation_pair_from_json(const json& j) {
    CorrelationPair pair;
    pair.tau = j.at("tau");
    pair.c0 = matrix_from_json(j.at("c0"));
    pair.ctau = matrix_from_json(j.at("ctau"));
    if (j.contains("meta")) {
        pair.meta.duration = j["meta"].value("duration", 0.0);
        pair.meta.delta = j["meta"].value("delta", 0.0);
        pair.meta.basis = j["meta"].value("basis", "");
    }
    return pair;
}

inline json solution_to_json(const VacSolution& sol) {
    json lam = json::array();
    for (Eigen::Index i = 0; i < sol.retained; ++i) lam.push_back(sol.eigenvalues[i]);
    json dropped = json::array();
    for (auto d : sol.dropped) dropped.push_back(d);
    return json{{"tau", sol.tau},
                {"retained", sol.retained},
                {"eigenvalues", lam},
                {"coeffs", matrix_to_json(sol.coeffs)},
                {"dropped", dropped}};
}

inline VacSolution solution_from_json(const json& j) {
    VacSolution sol;
    sol.tau = j.at("tau");
    sol.retained = j.at("retained");
    const json& lam = j.at("eigenvalues");
    sol.eigenvalues.resize(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i)
        sol.eigenvalues[static_cast<Eigen::Index>(i)] = lam[i];
    sol.coeffs = matrix_from_json(j.at("coeffs"));
    for (const auto& d : j.value("dropped", json::array()))
        sol.dropped.push_back(d.get<Eigen::Index>());
    return sol;
}

}  // namespace vac
