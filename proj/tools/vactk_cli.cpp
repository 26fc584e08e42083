// Batch front door: simulate trajectories, run the estimator, evaluate error
// diagnostics and bounds, and reproduce the built-in experiment presets.
// Exit codes: 0 success, 2 config/validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vac/diagnostics.hpp"
#include "vac/error_bounds.hpp"
#include "vac/experiment.hpp"
#include "vac/grid_oracle.hpp"
#include "vac/io.hpp"
#include "vac/ou_oracle.hpp"
#include "vac/sde.hpp"
#include "vac/vac_core.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CliError {
    int code;
    std::string message;
};

vac::BasisSet parse_basis(const std::string& spec) {
    if (spec == "polynomial-2d") return vac::polynomial_basis_2d();
    if (spec.rfind("indicator:", 0) == 0) {
        Eigen::Index n = 20;
        double offset = 0.1;
        if (std::sscanf(spec.c_str(), "indicator:n=%td,offset=%lf", &n, &offset) < 1)
            throw CliError{kExitValidation, "basis: expected indicator:n=<n>,offset=<x>"};
        return vac::indicator_basis(n, offset);
    }
    // otherwise a JSON file
    std::ifstream in(spec);
    if (!in) throw CliError{kExitValidation, "basis: cannot open " + spec};
    return vac::basis_from_json(vac::json::parse(in));
}

std::vector<double> parse_taus(const std::string& list) {
    std::vector<double> taus;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) taus.push_back(std::stod(item));
    if (taus.empty()) throw CliError{kExitValidation, "tau list is empty"};
    return taus;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw CliError{kExitValidation, "cannot open for writing: " + path};
    return os;
}

int run_simulate(const std::string& process, double duration, double delta,
                 std::uint64_t seed, const std::string& out, double burn_in,
                 double dt_internal) {
    vac::Trajectory traj = [&] {
        if (process == "ou") return vac::simulate_ou(duration, delta, seed);
        if (process == "double-well") {
            vac::DoubleWellSpec spec;
            spec.burn_in = burn_in;
            spec.dt_internal = dt_internal;
            return vac::simulate_double_well(spec, duration, delta, seed);
        }
        throw CliError{kExitValidation, "process must be ou or double-well"};
    }();
    vac::save_trajectory(out, traj);
    std::cout << "wrote " << traj.count() << " states (dim " << traj.dim() << ", delta "
              << traj.delta() << ") to " << out << "\n";
    return 0;
}

int run_vac(const std::string& traj_path, const std::string& basis_spec,
            const std::string& tau_list, double rank_tol, const std::string& out) {
    vac::Trajectory traj = vac::load_trajectory(traj_path);
    vac::BasisSet basis = parse_basis(basis_spec);
    std::vector<double> taus = parse_taus(tau_list);
    vac::json bundle = vac::json::array();
    std::cout << "tau";
    for (int i = 1; i <= 4; ++i) std::cout << ",lambda_" << i << ",timescale_" << i;
    std::cout << "\n";
    for (double tau : taus) {
        vac::CorrelationPair pair = vac::make_correlation_pair(traj, basis, tau);
        vac::VacSolution sol = vac::solve_vac(pair, rank_tol);
        if (!sol.dropped.empty())
            std::cerr << "warning: dropped " << sol.dropped.size()
                      << " empty/degenerate basis directions at tau " << tau << "\n";
        Eigen::VectorXd ts = vac::implied_timescales(sol);
        std::cout << vac::format_double(tau);
        for (Eigen::Index i = 0; i < 4; ++i) {
            bool have = i < sol.retained;
            std::cout << "," << (have ? vac::format_double(sol.eigenvalues[i]) : "na") << ","
                      << (have ? vac::format_double(ts[i]) : "na");
        }
        std::cout << "\n";
        bundle.push_back(vac::solution_to_json(sol));
    }
    if (!out.empty()) open_out(out) << bundle.dump(2) << "\n";
    return 0;
}

int run_mse(const std::string& traj_path, const std::string& basis_spec,
            const std::string& tau_list, Eigen::Index j, Eigen::Index k,
            const std::string& out) {
    vac::Trajectory traj = vac::load_trajectory(traj_path);
    vac::BasisSet basis = parse_basis(basis_spec);
    std::vector<vac::MseReport> reports;
    for (double tau : parse_taus(tau_list)) {
        vac::VacSolution sol = vac::solve_vac(vac::make_correlation_pair(traj, basis, tau));
        reports.push_back(vac::estimate_mse(traj, sol, basis, j, k));
    }
    if (out.empty()) {
        vac::write_mse_csv(std::cout, reports);
    } else {
        auto os = open_out(out);
        vac::write_mse_csv(os, reports);
    }
    return 0;
}

int run_bounds_cmd(Eigen::Index n, double offset, Eigen::Index k, const std::string& tau_list,
                   const std::string& out) {
    vac::BasisSet basis = vac::indicator_basis(n, offset);
    vac::OuOracle oracle(std::max<Eigen::Index>(8, k + 2), &basis);
    vac::BoundCurves curves = vac::run_bounds(oracle, basis, k, parse_taus(tau_list));
    if (out.empty()) {
        vac::write_bound_csv(std::cout, curves);
    } else {
        auto os = open_out(out);
        vac::write_bound_csv(os, curves);
    }
    return 0;
}

int run_condition(const std::string& traj_path, const std::string& basis_spec,
                  const std::string& tau_list, Eigen::Index j, Eigen::Index k) {
    vac::Trajectory traj = vac::load_trajectory(traj_path);
    vac::BasisSet basis = parse_basis(basis_spec);
    std::vector<vac::VacSolution> sweep;
    std::cout << "tau,condition\n";
    for (double tau : parse_taus(tau_list)) {
        sweep.push_back(vac::solve_vac(vac::make_correlation_pair(traj, basis, tau)));
        double c = vac::condition_number(sweep.back().eigenvalues, j,
                                         std::min(k, sweep.back().retained));
        std::cout << vac::format_double(tau) << "," << vac::format_double(c) << "\n";
    }
    vac::MinCondition best = vac::min_condition_number(sweep, j, k);
    std::cout << "# min condition " << vac::format_double(best.value) << " at tau "
              << vac::format_double(best.tau) << "\n";
    return 0;
}

int run_experiment_cmd(const std::string& which, const std::string& out_dir,
                       const std::string& cache_dir, std::optional<int> trials,
                       std::optional<std::uint64_t> seed) {
    vac::ExperimentConfig config;
    if (auto preset = vac::preset_by_name(which)) {
        config = *preset;
    } else {
        std::ifstream in(which);
        if (!in) throw CliError{kExitValidation, "experiment: no preset or file named " + which};
        try {
            config = vac::config_from_json(vac::json::parse(in));
        } catch (const vac::json::parse_error& e) {
            throw CliError{kExitValidation, std::string("config parse: ") + e.what()};
        }
    }
    if (trials) config.trials = *trials;
    if (seed) config.seed = *seed;
    config.output_dir = out_dir.empty() ? ("runs/" + config.name) : out_dir;
    config.cache_dir = cache_dir;
    auto errors = vac::validate_config(config);
    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw CliError{kExitValidation, msg};
    }
    vac::ExperimentResult result = vac::run_experiment(config);
    vac::write_experiment_files(result);
    for (const vac::BlockSummary& s : result.blocks)
        std::cout << "block (" << s.block.first << "," << s.block.second << "): optimal tau "
                  << s.optimal_tau << ", min condition (data) "
                  << vac::format_double(s.min_condition_data.value) << ", (ideal) "
                  << vac::format_double(s.min_condition_ideal.value) << "\n";
    std::cout << "results in " << config.output_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral estimation toolkit for reversible Markov processes"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a trajectory file");
    std::string process = "ou", out_file = "trajectory.csv";
    double duration = 1e4, delta = 0.1, burn_in = 10.0, dt_internal = 1e-4;
    std::uint64_t seed = 1;
    simulate->add_option("--process", process, "ou | double-well");
    simulate->add_option("--duration", duration);
    simulate->add_option("--delta", delta, "sampling interval");
    simulate->add_option("--seed", seed);
    simulate->add_option("--burn-in", burn_in, "double-well burn-in time");
    simulate->add_option("--dt-internal", dt_internal, "double-well integrator step");
    simulate->add_option("--out", out_file, ".csv or .bin");

    // vac
    auto* vac_cmd = app.add_subcommand("vac", "estimate eigenvalues/eigenfunctions");
    std::string traj_path, basis_spec = "indicator:n=20,offset=0.1", tau_list = "0.5";
    std::string sol_out;
    double rank_tol = 1e-10;
    vac_cmd->add_option("--traj", traj_path)->required();
    vac_cmd->add_option("--basis", basis_spec, "indicator:n=..,offset=.. | polynomial-2d | file.json");
    vac_cmd->add_option("--tau", tau_list, "comma-separated lag times");
    vac_cmd->add_option("--rank-tol", rank_tol);
    vac_cmd->add_option("--out", sol_out, "solution bundle json");

    // mse
    auto* mse = app.add_subcommand("mse", "data-driven mean squared estimation error");
    Eigen::Index block_j = 1, block_k = 3;
    std::string mse_out;
    mse->add_option("--traj", traj_path)->required();
    mse->add_option("--basis", basis_spec);
    mse->add_option("--tau", tau_list);
    mse->add_option("--block-j", block_j);
    mse->add_option("--block-k", block_k);
    mse->add_option("--out", mse_out, "csv path (default stdout)");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "approximation-error bounds vs the OU oracle");
    Eigen::Index bounds_n = 20, bounds_k = 2;
    double bounds_offset = 0.1;
    std::string bounds_out;
    bounds->add_option("--n", bounds_n, "indicator cell count");
    bounds->add_option("--offset", bounds_offset);
    bounds->add_option("--k", bounds_k);
    bounds->add_option("--tau", tau_list);
    bounds->add_option("--out", bounds_out, "csv path (default stdout)");

    // condition
    auto* condition = app.add_subcommand("condition", "condition-number sweep from data");
    condition->add_option("--traj", traj_path)->required();
    condition->add_option("--basis", basis_spec);
    condition->add_option("--tau", tau_list);
    condition->add_option("--block-j", block_j);
    condition->add_option("--block-k", block_k);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a preset or config file");
    std::string which, exp_out, cache_dir = "oracle_cache";
    std::optional<int> trials_override;
    std::optional<std::uint64_t> seed_override;
    experiment->add_option("name", which, "ou-trial-1 | ou-trial-2 | double-well | config.json")
        ->required();
    experiment->add_option("--out", exp_out, "output directory");
    experiment->add_option("--cache-dir", cache_dir, "oracle cache directory");
    experiment->add_option("--trials", trials_override);
    experiment->add_option("--seed", seed_override);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return run_simulate(process, duration, delta, seed, out_file, burn_in, dt_internal);
        if (vac_cmd->parsed()) return run_vac(traj_path, basis_spec, tau_list, rank_tol, sol_out);
        if (mse->parsed()) return run_mse(traj_path, basis_spec, tau_list, block_j, block_k, mse_out);
        if (bounds->parsed())
            return run_bounds_cmd(bounds_n, bounds_offset, bounds_k, tau_list, bounds_out);
        if (condition->parsed())
            return run_condition(traj_path, basis_spec, tau_list, block_j, block_k);
        if (experiment->parsed())
            return run_experiment_cmd(which, exp_out, cache_dir, trials_override, seed_override);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const vac::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
