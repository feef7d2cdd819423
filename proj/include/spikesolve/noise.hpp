#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "spikesolve/torus.hpp"

namespace spikesolve {

enum class NoiseKind { gaussian, bounded };

/// Gaussian: real and imaginary parts of every noise coefficient are i.i.d.
/// N(0, sigma^2). Bounded: a random direction rescaled to L2 norm `epsilon`.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double sigma = 0.0;
    double gamma = 0.1;
    double epsilon = 0.0;  ///< bounded kind only
    std::uint64_t seed = 0;

    void validate() const;
};

/// The noise spectrum eta_hat(m), |m| <= M.
struct NoiseRealization {
    TrigPoly spectrum;
};

/// Deterministic in (seed); the coefficient for frequency m depends only on
/// (seed, m), never on the order of generation.
NoiseRealization sample_gaussian_noise(int M, double sigma, std::uint64_t seed);

/// sigma (1 + gamma) sqrt(2 (2M + 1)).
double epsilon_from_gaussian(int M, double sigma, double gamma);

/// exp(-2 (2M + 1) gamma^2).
double failure_probability_bound(int M, double gamma);

/// Laurent-Massart threshold dof + 2 sqrt(dof x) + 2x with P(chi2_dof >= t) <= e^{-x}.
double chi2_tail_bound(double dof, double x);

struct TailReport {
    std::size_t trials = 0;
    std::size_t exceedances = 0;
    double frequency = 0.0;
    double bound = 0.0;
    double standard_error = 0.0;  ///< binomial, evaluated at the bound
    double chi2_mean = 0.0;       ///< mean of |P_M eta|^2 / sigma^2
    double chi2_variance = 0.0;
    bool pass = false;            ///< frequency <= bound + 3 standard errors
};

/// Fraction of realizations with |P_M eta|_{L2} >= epsilon_from_gaussian(M, sigma, gamma).
TailReport tail_montecarlo(int M, double sigma, double gamma, std::size_t trials,
                           std::uint64_t seed);

struct Observation {
    TrigPoly y;
    int degree() const noexcept { return y.degree(); }
};

struct ObservationBundle {
    Observation observation;
    NoiseRealization noise;
    double epsilon = 0.0;
};

/// y = P_M mu0 + noise, with epsilon as prescribed for the noise kind.
ObservationBundle make_observation(const DiscreteMeasure& mu0, int M, const NoiseSpec& noise);

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

}  // namespace spikesolve
