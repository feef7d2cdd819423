#include "spikesolve/noise.hpp"

#include <cmath>

#include "spikesolve/errors.hpp"
#include "spikesolve/rng.hpp"

namespace spikesolve {

void NoiseSpec::validate() const {
    if (!(sigma >= 0.0)) throw ParameterError("noise sigma must be nonnegative");
    if (kind == NoiseKind::gaussian && !(gamma > 0.0)) {
        throw ParameterError("gaussian noise needs gamma > 0");
    }
    if (kind == NoiseKind::bounded && !(epsilon >= 0.0)) {
        throw ParameterError("bounded noise needs epsilon >= 0");
    }
}

NoiseRealization sample_gaussian_noise(int M, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ParameterError("noise sigma must be nonnegative");
    TrigPoly spec(M);
    if (sigma == 0.0) return {spec};
    for (int m = -M; m <= M; ++m) {
        CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(m))));
        spec.coeff_ref(m) = sigma * rng.normal_pair();
    }
    return {spec};
}

double epsilon_from_gaussian(int M, double sigma, double gamma) {
    if (M < 1) throw ParameterError("epsilon_from_gaussian needs M >= 1");
    return sigma * (1.0 + gamma) * std::sqrt(2.0 * (2.0 * M + 1.0));
}

double failure_probability_bound(int M, double gamma) {
    if (M < 1 || !(gamma > 0.0)) throw ParameterError("failure bound needs M >= 1, gamma > 0");
    return std::exp(-2.0 * (2.0 * M + 1.0) * gamma * gamma);
}

double chi2_tail_bound(double dof, double x) {
    if (!(dof >= 1.0) || !(x > 0.0)) throw ParameterError("chi2 tail bound needs dof >= 1, x > 0");
    return dof + 2.0 * std::sqrt(dof * x) + 2.0 * x;
}

TailReport tail_montecarlo(int M, double sigma, double gamma, std::size_t trials,
                           std::uint64_t seed) {
    if (trials < 1000) throw ParameterError("tail Monte-Carlo needs at least 1000 trials");
    TailReport r;
    r.trials = trials;
    r.bound = failure_probability_bound(M, gamma);
    const double eps = epsilon_from_gaussian(M, sigma, gamma);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto noise = sample_gaussian_noise(M, sigma, derive_key(seed, t));
        const double norm = trig_l2_norm(noise.spectrum);
        if (sigma > 0.0 && norm >= eps) ++r.exceedances;
        if (sigma > 0.0) {
            const double q = norm * norm / (sigma * sigma);
            sum += q;
            sum_sq += q * q;
        }
    }
    const auto n = static_cast<double>(trials);
    r.frequency = static_cast<double>(r.exceedances) / n;
    r.chi2_mean = sum / n;
    r.chi2_variance = n > 1 ? (sum_sq - n * r.chi2_mean * r.chi2_mean) / (n - 1.0) : 0.0;
    r.standard_error = std::sqrt(r.bound * (1.0 - r.bound) / n);
    r.pass = r.frequency <= r.bound + 3.0 * r.standard_error;
    return r;
}

ObservationBundle make_observation(const DiscreteMeasure& mu0, int M, const NoiseSpec& noise) {
    noise.validate();
    ObservationBundle out;
    TrigPoly clean = project(mu0, M);
    if (noise.kind == NoiseKind::gaussian) {
        out.noise = sample_gaussian_noise(M, noise.sigma, noise.seed);
        out.epsilon = epsilon_from_gaussian(M, noise.sigma, noise.gamma);
    } else {
        out.epsilon = noise.epsilon;
        auto dir = sample_gaussian_noise(M, 1.0, noise.seed);
        const double norm = trig_l2_norm(dir.spectrum);
        if (noise.epsilon == 0.0 || norm == 0.0) {
            dir.spectrum = TrigPoly(M);
        } else {
            dir.spectrum *= noise.epsilon / norm;
            // Keep the realized norm on the ball, not just outside it by an ulp.
            while (trig_l2_norm(dir.spectrum) > noise.epsilon) dir.spectrum *= 1.0 - 0x1.0p-52;
        }
        out.noise = std::move(dir);
    }
    out.observation.y = clean + out.noise.spectrum;
    return out;
}

std::string to_string(NoiseKind kind) {
    return kind == NoiseKind::gaussian ? "gaussian" : "bounded-adversarial";
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseKind::gaussian;
    if (s == "bounded-adversarial" || s == "bounded") return NoiseKind::bounded;
    throw ParameterError("unknown noise kind '" + s + "'");
}

}  // namespace spikesolve
