#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikesolve/io.hpp"

namespace spikesolve {

struct SuiteOptions {
    std::uint64_t seed = 20240611;
    /// Instance/trial count override; 0 keeps each suite's default.
    int trials = 0;
};

/// Result of one verification sweep.
struct SuiteOutcome {
    std::string name;
    int criterion = 0;
    bool pass = false;
    std::string summary;  ///< one line, also printed by the acceptance runner
    json details;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    double seconds = 0.0;
    double time_limit = 0.0;  ///< seconds; part of the pass condition
};

/// Suite names in criterion order: certificate-exactness, certificate-scaling,
/// recovery, mass-bound, noise-tail, localization, scaling, oracle, kernels.
const std::vector<std::string>& suite_names();

/// Throws ParameterError for an unknown name.
SuiteOutcome run_suite(const std::string& name, const SuiteOptions& opts = {});

SuiteOutcome suite_certificate_exactness(const SuiteOptions& opts);
SuiteOutcome suite_certificate_scaling(const SuiteOptions& opts);
SuiteOutcome suite_recovery(const SuiteOptions& opts);
SuiteOutcome suite_mass_bound(const SuiteOptions& opts);
SuiteOutcome suite_noise_tail(const SuiteOptions& opts);
SuiteOutcome suite_localization(const SuiteOptions& opts);
SuiteOutcome suite_scaling(const SuiteOptions& opts);
SuiteOutcome suite_oracle(const SuiteOptions& opts);
SuiteOutcome suite_kernels(const SuiteOptions& opts);

/// CSV text (header plus rows, each row tagged with seed and config hash).
std::string suite_csv(const SuiteOutcome& outcome);

/// Ratio max / min of positive values; 1 when every value is below `floor`.
double spread(const std::vector<double>& values, double floor = 1e-12);

}  // namespace spikesolve
