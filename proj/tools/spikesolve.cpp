// spikesolve: generate instances, observe, solve, certify, analyze and sweep.
//
// Exit codes: 0 success, 2 usage or I/O error, 3 numerical or assertion failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "spikesolve/certificate.hpp"
#include "spikesolve/error_analysis.hpp"
#include "spikesolve/errors.hpp"
#include "spikesolve/instances.hpp"
#include "spikesolve/io.hpp"
#include "spikesolve/noise.hpp"
#include "spikesolve/sampling.hpp"
#include "spikesolve/solvers.hpp"
#include "spikesolve/suites.hpp"

using namespace spikesolve;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCheck = 3;
constexpr double kRecoveryPositionTol = 1e-4;
constexpr double kRecoveryAmplitudeTol = 1e-3;

/// Thrown when a run completes but a checked property does not hold.
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string& out, const json& j) { write_text_file(out, j.dump(2) + "\n"); }

/// Accepts a bare polynomial or an `observe` bundle.
Observation load_observation(const std::string& path, double* epsilon) {
    const json j = read_json_file(path);
    if (j.contains("observation")) {
        if (epsilon && j.contains("epsilon")) *epsilon = j.at("epsilon").get<double>();
        return {trigpoly_from_json(j.at("observation"))};
    }
    return {trigpoly_from_json(j)};
}

struct Common {
    int M = 128;
    int J = 4;
    double sigma = 0.0;
    double gamma = 0.1;
    double tau = 0.0;
    double delta = 0.0;
    int grid_factor = 16;
    double gap_tol = 1e-10;
    int trials = 0;
    std::uint64_t seed = 0;
    std::string out = "-";
};

/// Config file values, overridden by flags given explicitly.
SolverConfig solver_config(const Common& c, const std::string& config_file, const CLI::App& sub) {
    SolverConfig cfg = config_file.empty() ? SolverConfig{} : solver_config_from_json(read_json_file(config_file));
    if (config_file.empty() || sub.count("--grid-factor")) cfg.grid_factor = c.grid_factor;
    if (config_file.empty() || sub.count("--gap-tol")) cfg.gap_tolerance = c.gap_tol;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse spike recovery on the torus from low-frequency Fourier data"};
    app.require_subcommand(1);
    Common c;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "Output path ('-' for stdout)");
        sub->add_option("--seed", c.seed, "Root seed");
    };

    // generate
    auto* gen = app.add_subcommand("generate", "Random measure with separated support");
    double margin = 1.0;
    std::string law = "unit-phase";
    gen->add_option("--J", c.J, "Number of spikes")->check(CLI::NonNegativeNumber);
    gen->add_option("--M", c.M, "Cutoff frequency")->check(CLI::PositiveNumber);
    gen->add_option("--margin", margin, "Separation in units of 2/M (>= 1)");
    gen->add_option("--law", law, "Amplitude law: unit-phase | complex-gaussian");
    add_common(gen);

    // observe
    auto* obs = app.add_subcommand("observe", "Noisy low-frequency data of a measure");
    std::string measure_file, noise_file, kind = "gaussian";
    double epsilon = 0.0;
    obs->add_option("--measure", measure_file, "Measure JSON")->required();
    obs->add_option("--M", c.M, "Cutoff frequency")->check(CLI::PositiveNumber);
    obs->add_option("--noise", noise_file, "Noise spec JSON (overrides the flags below)");
    obs->add_option("--kind", kind, "gaussian | bounded");
    obs->add_option("--sigma", c.sigma, "Gaussian standard deviation per component");
    obs->add_option("--gamma", c.gamma, "Gaussian confidence parameter");
    obs->add_option("--epsilon", epsilon, "Noise norm for the bounded kind");
    add_common(obs);

    // solve
    auto* sol = app.add_subcommand("solve", "Recover a measure from an observation");
    std::string obs_file, config_file, truth_file;
    bool noiseless = false;
    sol->add_option("--obs", obs_file, "Observation JSON")->required();
    sol->add_option("--tau", c.tau, "Penalized problem with this tau");
    sol->add_option("--delta", c.delta, "Constrained problem with residual bound delta");
    sol->add_flag("--noiseless", noiseless, "Exact-data problem");
    sol->add_option("--grid-factor", c.grid_factor, "Candidate grid factor");
    sol->add_option("--gap-tol", c.gap_tol, "Relative duality gap tolerance");
    sol->add_option("--config", config_file, "Solver config JSON");
    sol->add_option("--truth", truth_file, "Ground truth measure for an approximation check");
    sol->add_option("--epsilon", epsilon, "Noise level for the approximation check");
    add_common(sol);

    // certify
    auto* cert = app.add_subcommand("certify", "Interpolating certificate with the signs of a measure");
    std::string support_file;
    std::size_t cert_grid = std::size_t{1} << 18;
    cert->add_option("--measure", support_file, "Measure JSON (support and phases)")->required();
    cert->add_option("--M", c.M, "Cutoff frequency")->check(CLI::PositiveNumber);
    cert->add_option("--grid", cert_grid, "Scan grid size");
    add_common(cert);

    // analyze
    auto* ana = app.add_subcommand("analyze", "Error functionals of an estimate");
    std::string estimate_file, family = "fejer";
    int N = 0;
    double bump_L = 4.0;
    ana->add_option("--truth", truth_file, "Ground truth measure JSON")->required();
    ana->add_option("--estimate", estimate_file, "Estimate JSON (measure or solve output)")->required();
    ana->add_option("--M", c.M, "Cutoff frequency")->check(CLI::PositiveNumber);
    ana->add_option("--epsilon", epsilon, "Noise level")->required();
    ana->add_option("--kernel", family, "fejer | dirichlet | bump");
    ana->add_option("--N", N, "Kernel scale (default M)");
    ana->add_option("--L", bump_L, "Bump width parameter (> 2)");
    add_common(ana);

    // sweep
    auto* swp = app.add_subcommand("sweep", "Acceptance sweeps");
    std::string suite = "all";
    swp->add_option("--suite", suite, "Suite name or 'all'");
    swp->add_option("--trials", c.trials, "Instance count override");
    swp->add_option("--seed", c.seed, "Root seed");
    swp->add_option("--out", c.out, "CSV file (one suite) or directory ('all')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            const auto mu = random_separated_measure(c.J, c.M, margin, c.seed, amplitude_law_from_string(law));
            emit(c.out, to_json(mu));
        } else if (*obs) {
            const auto mu0 = measure_from_json(read_json_file(measure_file));
            NoiseSpec spec;
            if (!noise_file.empty()) {
                spec = noise_spec_from_json(read_json_file(noise_file));
            } else {
                spec.kind = noise_kind_from_string(kind);
                spec.sigma = c.sigma;
                spec.gamma = c.gamma;
                spec.epsilon = epsilon;
                spec.seed = c.seed;
            }
            const auto bundle = make_observation(mu0, c.M, spec);
            emit(c.out, {{"observation", to_json(bundle.observation.y)},
                         {"noise", to_json(spec)},
                         {"epsilon", bundle.epsilon},
                         {"noise_l2", trig_l2_norm(bundle.noise.spectrum)}});
        } else if (*sol) {
            double bundle_eps = 0.0;
            const Observation o = load_observation(obs_file, &bundle_eps);
            const SolverConfig cfg = solver_config(c, config_file, *sol);
            const int modes = (c.tau > 0.0) + (c.delta > 0.0) + noiseless;
            if (modes != 1) throw ParameterError("give exactly one of --tau, --delta, --noiseless");
            const SolveResult r = c.tau > 0.0     ? solve_tikhonov(o, c.tau, cfg)
                                  : c.delta > 0.0 ? solve_constrained(o, c.delta, cfg)
                                                  : solve_noiseless(o, cfg);
            json j = to_json(r);
            bool ok = r.converged;
            if (!truth_file.empty() && noiseless) {
                const auto mu0 = measure_from_json(read_json_file(truth_file));
                const auto match = match_measures(r.measure, mu0, near_radius(o.degree()));
                j["recovery"] = to_json(match);
                ok = ok && match.max_position_error <= kRecoveryPositionTol &&
                     match.max_amplitude_error <= kRecoveryAmplitudeTol &&
                     match.unmatched_mass <= kRecoveryAmplitudeTol * total_variation(mu0);
                if (r.converged && !ok) {
                    emit(c.out, j);
                    throw CheckFailed("recovery check failed");
                }
            } else if (!truth_file.empty()) {
                const double eps = epsilon > 0.0 ? epsilon : bundle_eps;
                const auto rep = is_approximation(r.measure, measure_from_json(read_json_file(truth_file)),
                                                  o.degree(), eps);
                j["approximation"] = to_json(rep);
                j["approximation"]["epsilon"] = eps;
                ok = ok && rep.pass();
            }
            emit(c.out, j);
            if (!ok) throw CheckFailed(r.converged ? "approximation check failed" : "solver did not converge: " + r.status);
        } else if (*cert) {
            const auto mu = measure_from_json(read_json_file(support_file)).canonical();
            const auto support = mu.support();
            Eigen::VectorXcd v(static_cast<Eigen::Index>(mu.size()));
            for (std::size_t j = 0; j < mu.size(); ++j) {
                const complex a = mu.spikes()[j].amplitude;
                v(static_cast<Eigen::Index>(j)) = a / std::abs(a);
            }
            const auto mats = build_matrices(support, c.M);
            const auto coeffs = solve_coefficients(mats, v, Eigen::VectorXcd::Zero(v.size()));
            const auto dual = dual_certificate(support, v, c.M, cert_grid);
            const auto interp = verify_interpolation(dual.certificate, v, Eigen::VectorXcd::Zero(v.size()), 1e-8);
            const TrigPoly f = dual.certificate.spectral_form();
            json j = {{"M", c.M},
                      {"J", mu.size()},
                      {"theory_regime", mats.theory_regime},
                      {"block_residual", coeffs.residual},
                      {"condition_estimate", coeffs.condition_estimate},
                      {"interpolation", to_json(interp)},
                      {"norm_bounds", to_json(norm_bound_report(mats))},
                      {"sup_norm", global_peak(f, cert_grid).modulus},
                      {"sup_off_support", dual.sup_off_support},
                      {"sup_outside_neighborhoods", dual.sup_outside_neighborhoods},
                      {"strictly_below_one_off_support", dual.strictly_below_one},
                      {"grid_size", cert_grid}};
            emit(c.out, j);
            if (!interp.pass) throw CheckFailed("certificate does not interpolate");
        } else if (*ana) {
            const auto mu0 = measure_from_json(read_json_file(truth_file));
            const json est = read_json_file(estimate_file);
            const auto mu = measure_from_json(est.contains("measure") ? est.at("measure") : est);
            const Kernel K = make_kernel(kernel_family_from_string(family), N > 0 ? N : c.M, bump_L);
            const auto nbhd = neighborhoods(mu0.support(), c.M);
            const auto nu = difference(mu, mu0);
            const auto se = smoothed_error(K, mu, mu0, smoothed_error_grid(K, c.M));
            const double rhs = smoothed_error_bound(K, c.M, epsilon);
            const auto dec = proof_decomposition(K, nu, nbhd);
            emit(c.out, {{"M", c.M},
                         {"kernel", K.name()},
                         {"N", K.nominal_scale()},
                         {"epsilon", epsilon},
                         {"far_mass", far_mass(nu, nbhd)},
                         {"near_second_moment", near_second_moment(nu, nbhd)},
                         {"smoothed_sup", se.estimate},
                         {"smoothed_sup_upper_bound", se.upper_bound},
                         {"smoothed_error_bound", rhs},
                         {"empirical_constant", rhs > 0.0 ? se.estimate / rhs : 0.0},
                         {"decomposition", to_json(dec)}});
        } else if (*swp) {
            SuiteOptions opts;
            if (swp->count("--seed")) opts.seed = c.seed;
            opts.trials = c.trials;
            const auto names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
            if (suite == "all" && c.out != "-") std::filesystem::create_directories(c.out);
            bool ok = true;
            for (const auto& name : names) {
                const SuiteOutcome r = run_suite(name, opts);
                std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.summary << "\n";
                ok = ok && r.pass;
                const std::string csv = suite_csv(r);
                if (suite == "all" && c.out != "-") {
                    write_text_file((std::filesystem::path(c.out) / (name + ".csv")).string(), csv);
                } else {
                    write_text_file(c.out, csv);
                }
            }
            if (!ok) throw CheckFailed("sweep failed");
        }
    } catch (const IoError& e) {
        std::cerr << "spikesolve: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParameterError& e) {
        std::cerr << "spikesolve: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "spikesolve: bad input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "spikesolve: numerical failure: " << e.what() << "\n";
        return kExitCheck;
    } catch (const CheckFailed& e) {
        std::cerr << "spikesolve: " << e.what() << "\n";
        return kExitCheck;
    }
    return 0;
}
