#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vac/diagnostics.hpp"
#include "vac/error_bounds.hpp"
#include "vac/grid_oracle.hpp"
#include "vac/io.hpp"
#include "vac/ou_oracle.hpp"
#include "vac/parallel.hpp"
#include "vac/sde.hpp"
#include "vac/subspace.hpp"
#include "vac/vac_core.hpp"

namespace vac {

struct ProcessSpec {
    enum class Kind { Ou, DoubleWell };
    Kind kind = Kind::Ou;
    DoubleWellSpec double_well;
};

struct BasisSpec {
    enum class Kind { Indicator, Polynomial2d };
    Kind kind = Kind::Indicator;
    Eigen::Index n = 20;
    double offset = 0.1;

    BasisSet build() const {
        return kind == Kind::Indicator ? indicator_basis(n, offset) : polynomial_basis_2d();
    }
};

struct ExperimentConfig {
    std::string name = "custom";
    ProcessSpec process;
    BasisSpec basis;
    std::vector<double> tau_grid;
    double duration = 1e4;
    double delta = 0.1;
    int trials = 30;
    std::uint64_t seed = 7;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks = {{1, 3}};
    Eigen::Index oracle_modes = 8;
    DoubleWellGridSpec grid;
    std::string output_dir;
    std::string cache_dir;
};

// --- presets (section 4 experiment configurations) --------------------------

inline ExperimentConfig preset_ou_trial_1() {
    ExperimentConfig c;
    c.name = "ou-trial-1";
    c.basis = {BasisSpec::Kind::Indicator, 20, 0.1};
    c.duration = 1e4;
    c.delta = 0.1;
    c.trials = 30;
    c.seed = 101;
    c.blocks = {{1, 3}};
    for (int m = 1; m <= 15; ++m) c.tau_grid.push_back(0.1 * m);
    return c;
}

inline ExperimentConfig preset_ou_trial_2() {
    ExperimentConfig c = preset_ou_trial_1();
    c.name = "ou-trial-2";
    c.basis.n = 50;
    c.duration = 500.0;
    c.seed = 202;
    return c;
}

inline ExperimentConfig preset_double_well() {
    ExperimentConfig c;
    c.name = "double-well";
    c.process.kind = ProcessSpec::Kind::DoubleWell;
    c.basis.kind = BasisSpec::Kind::Polynomial2d;
    c.duration = 510.0;  // 500 time units kept after the 10-unit burn-in
    c.delta = 0.05;
    c.trials = 1;
    c.seed = 303;
    c.blocks = {{1, 2}, {1, 3}};
    c.oracle_modes = 6;
    for (int m = 1; m <= 30; ++m) c.tau_grid.push_back(0.05 * m);
    return c;
}

inline std::optional<ExperimentConfig> preset_by_name(const std::string& name) {
    if (name == "ou-trial-1") return preset_ou_trial_1();
    if (name == "ou-trial-2") return preset_ou_trial_2();
    if (name == "double-well") return preset_double_well();
    return std::nullopt;
}

// --- config (de)serialization and validation --------------------------------

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["process"] = (c.process.kind == ProcessSpec::Kind::Ou) ? "ou" : "double-well";
    if (c.process.kind == ProcessSpec::Kind::DoubleWell) {
        j["double_well"] = {{"dt_internal", c.process.double_well.dt_internal},
                            {"burn_in", c.process.double_well.burn_in}};
    }
    j["basis"] = {{"kind", c.basis.kind == BasisSpec::Kind::Indicator ? "indicator" : "polynomial-2d"},
                  {"n", c.basis.n},
                  {"offset", c.basis.offset}};
    j["tau_grid"] = c.tau_grid;
    j["duration"] = c.duration;
    j["delta"] = c.delta;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    json blocks = json::array();
    for (auto [a, b] : c.blocks) blocks.push_back({a, b});
    j["blocks"] = blocks;
    j["oracle_modes"] = c.oracle_modes;
    if (c.process.kind == ProcessSpec::Kind::DoubleWell)
        j["grid_spacing"] = c.grid.spacing;
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.name = j.value("name", "custom");
    std::string process = j.value("process", "ou");
    if (process == "double-well") {
        c.process.kind = ProcessSpec::Kind::DoubleWell;
        if (j.contains("double_well")) {
            c.process.double_well.dt_internal = j["double_well"].value("dt_internal", 1e-4);
            c.process.double_well.burn_in = j["double_well"].value("burn_in", 10.0);
        }
        c.basis.kind = BasisSpec::Kind::Polynomial2d;
        if (j.contains("grid_spacing")) c.grid.spacing = j["grid_spacing"];
    } else if (process != "ou") {
        throw std::invalid_argument("/process: expected \"ou\" or \"double-well\"");
    }
    if (j.contains("basis")) {
        std::string kind = j["basis"].value("kind", "indicator");
        if (kind == "indicator")
            c.basis.kind = BasisSpec::Kind::Indicator;
        else if (kind == "polynomial-2d")
            c.basis.kind = BasisSpec::Kind::Polynomial2d;
        else
            throw std::invalid_argument("/basis/kind: unknown kind " + kind);
        c.basis.n = j["basis"].value("n", 20);
        c.basis.offset = j["basis"].value("offset", 0.1);
    }
    c.tau_grid = j.value("tau_grid", std::vector<double>{});
    c.duration = j.value("duration", 1e4);
    c.delta = j.value("delta", 0.1);
    c.trials = j.value("trials", 30);
    c.seed = j.value("seed", std::uint64_t{7});
    if (j.contains("blocks")) {
        c.blocks.clear();
        for (const auto& b : j["blocks"])
            c.blocks.emplace_back(b.at(0).get<Eigen::Index>(), b.at(1).get<Eigen::Index>());
    }
    c.oracle_modes = j.value("oracle_modes", 8);
    return c;
}

// Returns one "/json/pointer: message" line per violation; empty means valid.
inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
    std::vector<std::string> errors;
    if (c.tau_grid.empty()) errors.push_back("/tau_grid: must not be empty");
    for (std::size_t i = 0; i < c.tau_grid.size(); ++i) {
        double ratio = c.tau_grid[i] / c.delta;
        if (std::abs(ratio - std::round(ratio)) > 1e-8 * (1.0 + ratio))
            errors.push_back("/tau_grid/" + std::to_string(i) +
                             ": not a multiple of delta=" + format_double(c.delta));
        if (i > 0 && !(c.tau_grid[i] > c.tau_grid[i - 1]))
            errors.push_back("/tau_grid/" + std::to_string(i) + ": grid must be increasing");
        if (c.tau_grid[i] >= c.duration -
                                 (c.process.kind == ProcessSpec::Kind::DoubleWell
                                      ? c.process.double_well.burn_in
                                      : 0.0))
            errors.push_back("/tau_grid/" + std::to_string(i) + ": lag exceeds trajectory span");
    }
    if (!(c.delta > 0.0)) errors.push_back("/delta: must be positive");
    if (!(c.duration > 0.0)) errors.push_back("/duration: must be positive");
    if (c.trials < 1) errors.push_back("/trials: must be >= 1");
    if (c.basis.kind == BasisSpec::Kind::Indicator && c.basis.n < 2)
        errors.push_back("/basis/n: indicator basis needs n >= 2");
    Eigen::Index max_n =
        c.basis.kind == BasisSpec::Kind::Indicator ? c.basis.n : Eigen::Index{6};
    for (std::size_t i = 0; i < c.blocks.size(); ++i) {
        auto [a, b] = c.blocks[i];
        if (a < 1 || a > b || b > max_n)
            errors.push_back("/blocks/" + std::to_string(i) + ": need 1 <= j <= k <= n");
        if (b > c.oracle_modes)
            errors.push_back("/blocks/" + std::to_string(i) + ": k exceeds oracle_modes");
    }
    if (c.process.kind == ProcessSpec::Kind::DoubleWell) {
        double stride = c.delta / c.process.double_well.dt_internal;
        if (std::abs(stride - std::round(stride)) > 1e-9 * stride)
            errors.push_back("/delta: not a multiple of double_well/dt_internal");
    }
    return errors;
}

// --- results ----------------------------------------------------------------

struct TauTrialResult {
    Eigen::VectorXd eigenvalues;   // top eigenvalues (up to 6)
    double total_error = std::numeric_limits<double>::quiet_NaN();
    double estimation_error = std::numeric_limits<double>::quiet_NaN();
    double calc_rms = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd timescales;    // implied timescales 1..top
};

struct BlockSummary {
    std::pair<Eigen::Index, Eigen::Index> block;
    std::vector<double> approx_error;        // per tau (idealized vs truth)
    std::vector<double> total_mean, total_sd;
    std::vector<double> est_mean, est_sd;
    std::vector<double> calc_rms_mean, calc_rms_sd;
    double optimal_tau = 0.0;                // argmin of mean total error
    MinCondition min_condition_data;         // from sampled eigenvalue means
    MinCondition min_condition_ideal;        // from idealized eigenvalues
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<double> taus;
    // indexed [block][tau][trial]
    std::vector<std::vector<std::vector<TauTrialResult>>> cells;
    std::vector<BlockSummary> blocks;
    std::vector<Eigen::VectorXd> mean_eigenvalues;  // per tau, mean over trials
    std::vector<VacSolution> ideal_solutions;       // per tau
};

namespace detail {

inline double nan_mean(const std::vector<double>& v) {
    double acc = 0.0;
    int n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            acc += x;
            ++n;
        }
    return n ? acc / n : std::numeric_limits<double>::quiet_NaN();
}

inline double nan_sd(const std::vector<double>& v) {
    double m = nan_mean(v);
    double acc = 0.0;
    int n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            double d = x - m;
            acc += d * d;
            ++n;
        }
    return n > 1 ? std::sqrt(acc / (n - 1)) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

// Run the configured experiment: per tau and trial a VAC solution, true error
// against the oracle, the data-driven error estimate, and implied timescales;
// aggregated across trials afterwards. Deterministic given the seed.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    {
        auto errors = validate_config(config);
        if (!errors.empty()) {
            std::string msg = "invalid config:";
            for (const auto& e : errors) msg += "\n  " + e;
            throw std::invalid_argument(msg);
        }
    }
    const BasisSet basis = config.basis.build();
    const bool is_ou = config.process.kind == ProcessSpec::Kind::Ou;
    const auto n_tau = static_cast<Eigen::Index>(config.tau_grid.size());

    // oracle data: reference spectrum, basis node values, ideal matrices
    std::optional<OuOracle> ou;
    std::optional<DoubleWellGridOracle> grid;
    if (is_ou) {
        ou.emplace(config.oracle_modes, &basis);
    } else {
        std::string cache;
        if (!config.cache_dir.empty()) {
            std::filesystem::create_directories(config.cache_dir);
            cache = (std::filesystem::path(config.cache_dir) /
                     config.grid.cache_key(config.oracle_modes)).string();
        }
        grid.emplace(DoubleWellGridOracle::cached(config.grid, config.oracle_modes, cache));
    }
    const SpectralReference& ref = is_ou ? ou->reference() : grid->reference();
    Eigen::MatrixXd phi_nodes = is_ou ? ou->basis_nodes(basis) : grid->basis_nodes(basis);
    Eigen::MatrixXd c0_ideal = is_ou ? ou->ideal_correlation(basis, 0.0)
                                     : grid->ideal_correlation(basis, 0.0);
    std::vector<Eigen::MatrixXd> ctau_ideal;
    if (is_ou) {
        ctau_ideal.reserve(config.tau_grid.size());
        for (double tau : config.tau_grid)
            ctau_ideal.push_back(ou->ideal_correlation(basis, tau));
    } else {
        ctau_ideal = grid->ideal_correlation_sweep(basis, config.tau_grid);
    }

    ExperimentResult result;
    result.config = config;
    result.taus = config.tau_grid;
    result.ideal_solutions.reserve(config.tau_grid.size());
    for (Eigen::Index t = 0; t < n_tau; ++t)
        result.ideal_solutions.push_back(
            solve_vac({c0_ideal, ctau_ideal[t], config.tau_grid[t], {}}, 1e-12));

    const GramMatrix node_gram = ref.gram();
    const GramMatrix coeff_gram = GramMatrix::dense(c0_ideal);

    // simulate and analyze trials; each (trial, tau) writes its own slot
    result.cells.assign(config.blocks.size(),
                        std::vector<std::vector<TauTrialResult>>(
                            config.tau_grid.size(),
                            std::vector<TauTrialResult>(config.trials)));
    std::vector<std::vector<Eigen::VectorXd>> lam_slots(
        config.tau_grid.size(), std::vector<Eigen::VectorXd>(config.trials));

    parallel_for_each(config.trials, [&](Eigen::Index trial) {
        std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));
        Trajectory traj = is_ou ? simulate_ou(config.duration, config.delta, trial_seed)
                                : simulate_double_well(config.process.double_well,
                                                       config.duration, config.delta, trial_seed);
        Eigen::MatrixXd c0_hat = estimate_correlation(traj, basis, 0.0);
        for (Eigen::Index t = 0; t < n_tau; ++t) {
            double tau = config.tau_grid[t];
            CorrelationPair pair{c0_hat, estimate_correlation(traj, basis, tau), tau, {}};
            VacSolution sol = solve_vac(pair);
            Eigen::Index top = std::min<Eigen::Index>(6, sol.retained);
            lam_slots[t][trial] = sol.eigenvalues.head(top);
            Eigen::VectorXd ts = implied_timescales(sol).head(top);
            for (std::size_t b = 0; b < config.blocks.size(); ++b) {
                auto [bj, bk] = config.blocks[b];
                TauTrialResult& cell = result.cells[b][t][trial];
                cell.eigenvalues = sol.eigenvalues.head(top);
                cell.timescales = ts;
                if (bk > sol.retained) continue;  // leave NaNs
                Eigen::MatrixXd coeff_block = sol.coeffs.middleCols(bj - 1, bk - bj + 1);
                cell.total_error =
                    subspace_distances({phi_nodes * coeff_block, node_gram},
                                       ref.eigenspace(bj, bk)).projection;
                const VacSolution& ideal = result.ideal_solutions[t];
                if (bk <= ideal.retained)
                    cell.estimation_error =
                        subspace_distances({coeff_block, coeff_gram},
                                           {ideal.coeffs.middleCols(bj - 1, bk - bj + 1),
                                            coeff_gram}).projection;
                cell.calc_rms = estimate_mse(traj, sol, basis, bj, bk).rms_subspace;
            }
        }
    });

    // aggregates
    result.mean_eigenvalues.resize(config.tau_grid.size());
    for (Eigen::Index t = 0; t < n_tau; ++t) {
        Eigen::Index top = lam_slots[t][0].size();
        for (int trial = 1; trial < config.trials; ++trial)
            top = std::min(top, lam_slots[t][trial].size());
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(top);
        for (int trial = 0; trial < config.trials; ++trial)
            mean += lam_slots[t][trial].head(top);
        result.mean_eigenvalues[t] = mean / config.trials;
    }
    for (std::size_t b = 0; b < config.blocks.size(); ++b) {
        BlockSummary summary;
        summary.block = config.blocks[b];
        auto [bj, bk] = config.blocks[b];
        for (Eigen::Index t = 0; t < n_tau; ++t) {
            const VacSolution& ideal = result.ideal_solutions[t];
            double approx = std::numeric_limits<double>::quiet_NaN();
            if (bk <= ideal.retained)
                approx = subspace_distances(
                             {phi_nodes * ideal.coeffs.middleCols(bj - 1, bk - bj + 1), node_gram},
                             ref.eigenspace(bj, bk)).projection;
            summary.approx_error.push_back(approx);
            std::vector<double> tot, est, calc;
            for (const TauTrialResult& cell : result.cells[b][t]) {
                tot.push_back(cell.total_error);
                est.push_back(cell.estimation_error);
                calc.push_back(cell.calc_rms);
            }
            summary.total_mean.push_back(detail::nan_mean(tot));
            summary.total_sd.push_back(detail::nan_sd(tot));
            summary.est_mean.push_back(detail::nan_mean(est));
            summary.est_sd.push_back(detail::nan_sd(est));
            std::vector<double> calc_sq;
            for (double c : calc) calc_sq.push_back(c * c);
            summary.calc_rms_mean.push_back(std::sqrt(detail::nan_mean(calc_sq)));
            summary.calc_rms_sd.push_back(detail::nan_sd(calc));
        }
        std::size_t best = 0;
        for (std::size_t t = 1; t < summary.total_mean.size(); ++t)
            if (summary.total_mean[t] < summary.total_mean[best]) best = t;
        summary.optimal_tau = config.tau_grid[best];

        std::vector<VacSolution> mean_sweep, ideal_sweep;
        for (Eigen::Index t = 0; t < n_tau; ++t) {
            VacSolution s;
            s.tau = config.tau_grid[t];
            s.eigenvalues = result.mean_eigenvalues[t];
            s.retained = s.eigenvalues.size();
            mean_sweep.push_back(std::move(s));
        }
        summary.min_condition_data = min_condition_number(mean_sweep, bj, bk);
        summary.min_condition_ideal = min_condition_number(result.ideal_solutions, bj, bk);
        result.blocks.push_back(std::move(summary));
    }
    return result;
}

// --- CSV / manifest emission -------------------------------------------------

inline void write_experiment_files(const ExperimentResult& result) {
    namespace fs = std::filesystem;
    const ExperimentConfig& config = result.config;
    if (config.output_dir.empty()) return;
    fs::create_directories(config.output_dir);
    auto path = [&](const std::string& leaf) { return fs::path(config.output_dir) / leaf; };

    {
        std::ofstream os(path("results.csv"));
        os << "block_j,block_k,tau,trial,total_error,estimation_error,calc_rms,"
              "lambda_2,lambda_3,timescale_2,timescale_3\n";
        for (std::size_t b = 0; b < config.blocks.size(); ++b)
            for (std::size_t t = 0; t < result.taus.size(); ++t)
                for (int trial = 0; trial < config.trials; ++trial) {
                    const TauTrialResult& cell = result.cells[b][t][trial];
                    auto at = [](const Eigen::VectorXd& v, Eigen::Index i) {
                        return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
                    };
                    os << config.blocks[b].first << "," << config.blocks[b].second << ","
                       << format_double(result.taus[t]) << "," << trial << ","
                       << format_double(cell.total_error) << ","
                       << format_double(cell.estimation_error) << ","
                       << format_double(cell.calc_rms) << ","
                       << format_double(at(cell.eigenvalues, 1)) << ","
                       << format_double(at(cell.eigenvalues, 2)) << ","
                       << format_double(at(cell.timescales, 1)) << ","
                       << format_double(at(cell.timescales, 2)) << "\n";
                }
    }
    {
        std::ofstream os(path("summary.csv"));
        os << "block_j,block_k,tau,approx_error,total_mean,total_sd,est_mean,est_sd,"
              "calc_rms_mean,calc_rms_sd\n";
        for (const BlockSummary& s : result.blocks)
            for (std::size_t t = 0; t < result.taus.size(); ++t)
                os << s.block.first << "," << s.block.second << ","
                   << format_double(result.taus[t]) << "," << format_double(s.approx_error[t])
                   << "," << format_double(s.total_mean[t]) << ","
                   << format_double(s.total_sd[t]) << "," << format_double(s.est_mean[t]) << ","
                   << format_double(s.est_sd[t]) << "," << format_double(s.calc_rms_mean[t])
                   << "," << format_double(s.calc_rms_sd[t]) << "\n";
    }
    {
        std::ofstream os(path("timescales.csv"));
        os << "tau,index,timescale_of_mean_lambda\n";
        for (std::size_t t = 0; t < result.taus.size(); ++t) {
            const Eigen::VectorXd& lam = result.mean_eigenvalues[t];
            for (Eigen::Index i = 0; i < lam.size(); ++i) {
                double ts = std::numeric_limits<double>::quiet_NaN();
                if (lam[i] >= 1.0)
                    ts = std::numeric_limits<double>::infinity();
                else if (lam[i] > 0.0)
                    ts = -result.taus[t] / std::log(lam[i]);
                os << format_double(result.taus[t]) << "," << (i + 1) << ","
                   << format_double(ts) << "\n";
            }
        }
    }
    {
        json summary;
        summary["name"] = config.name;
        for (const BlockSummary& s : result.blocks) {
            json b;
            b["block"] = {s.block.first, s.block.second};
            b["optimal_tau"] = s.optimal_tau;
            b["min_condition_data"] = {{"tau", s.min_condition_data.tau},
                                       {"value", s.min_condition_data.value}};
            b["min_condition_ideal"] = {{"tau", s.min_condition_ideal.tau},
                                        {"value", s.min_condition_ideal.value}};
            summary["blocks"].push_back(b);
        }
        std::ofstream os(path("summary.json"));
        os << summary.dump(2) << "\n";
    }
    {
        json manifest;
        manifest["config"] = config_to_json(config);
        std::string dump = manifest["config"].dump();
        std::uint64_t h = 14695981039346656037ULL;
        for (char ch : dump) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
        manifest["config_hash"] = hex;
        manifest["rng"] = kRngAlgorithm;
        manifest["version"] = "0.1.0";
        if (config.process.kind == ProcessSpec::Kind::DoubleWell)
            manifest["oracle_cache_key"] = config.grid.cache_key(config.oracle_modes);
        manifest["generated_unix_time"] = static_cast<long long>(std::time(nullptr));
        std::ofstream os(path("manifest.json"));
        os << manifest.dump(2) << "\n";
    }
}

// --- bound sweeps ------------------------------------------------------------

struct BoundCurves {
    std::vector<double> taus;
    Eigen::Index k = 2;
    std::vector<BoundReport> eigenvalue;  // Thm-style sandwich on lambda_k
    std::vector<BoundReport> subspace;    // gap-ratio upper bound
    std::vector<BoundReport> improved;    // long-lag-sharp upper bound
};

template <typename Oracle>
BoundCurves run_bounds(const Oracle& oracle, const BasisSet& basis, Eigen::Index k,
                       const std::vector<double>& taus) {
    if (taus.empty()) throw std::invalid_argument("run_bounds: empty tau grid");
    BoundCurves curves;
    curves.taus = taus;
    curves.k = k;
    for (double tau : taus) {
        curves.eigenvalue.push_back(rayleigh_ritz_eigenvalue_bound(oracle, basis, tau, k));
        curves.subspace.push_back(rayleigh_ritz_subspace_bound(oracle, basis, tau, k));
        curves.improved.push_back(improved_subspace_bound(oracle, basis, tau, k));
    }
    return curves;
}

inline void write_bound_csv(std::ostream& os, const BoundCurves& curves) {
    os << "bound,tau,k,lhs,lower,upper,satisfied,slack\n";
    auto emit = [&os](const char* name, const BoundReport& r) {
        os << name << "," << format_double(r.tau) << "," << r.k << ",";
        if (r.applicable)
            os << format_double(r.lhs) << "," << format_double(r.bound_lower) << ","
               << format_double(r.bound_upper) << "," << (r.satisfied ? 1 : 0) << ","
               << format_double(r.slack) << "\n";
        else
            os << "na,na,na,na,na\n";
    };
    for (std::size_t i = 0; i < curves.taus.size(); ++i) {
        emit("eigenvalue", curves.eigenvalue[i]);
        emit("subspace", curves.subspace[i]);
        emit("improved", curves.improved[i]);
    }
}

inline void write_mse_csv(std::ostream& os, const std::vector<MseReport>& reports) {
    os << "tau,pair_l,pair_m,variance,window,block_mse,block_rms\n";
    for (const MseReport& rep : reports)
        for (Eigen::Index l = 0; l < rep.variances.rows(); ++l)
            for (Eigen::Index m = 0; m < rep.variances.cols(); ++m)
                os << format_double(rep.tau) << "," << (l + 1) << "," << (rep.j + m) << ","
                   << format_double(rep.variances(l, m)) << "," << rep.windows(l, m) << ","
                   << format_double(rep.subspace_mse) << "," << format_double(rep.rms_subspace)
                   << "\n";
}

}  // namespace vac
