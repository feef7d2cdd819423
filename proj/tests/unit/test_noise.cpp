#include <doctest.h>

#include <cmath>

#include "spikesolve/errors.hpp"
#include "spikesolve/noise.hpp"

using namespace spikesolve;

TEST_SUITE("noise") {

TEST_CASE("chi-square mean and variance") {
    const int M = 16;
    const int trials = 20000;
    const double dof = 2.0 * (2 * M + 1);
    double s = 0.0, s2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto eta = sample_gaussian_noise(M, 0.7, static_cast<std::uint64_t>(t) + 1000);
        const double n = trig_l2_norm(eta.spectrum);
        const double q = n * n / (0.7 * 0.7);
        s += q;
        s2 += q * q;
    }
    const double mean = s / trials;
    const double var = s2 / trials - mean * mean;
    CHECK(std::abs(mean - dof) < 4.0 * std::sqrt(2.0 * dof / trials));
    CHECK(var == doctest::Approx(2.0 * dof).epsilon(0.05));
}

TEST_CASE("noise is keyed by seed and frequency") {
    const auto a = sample_gaussian_noise(4, 1.0, 99);
    const auto b = sample_gaussian_noise(8, 1.0, 99);
    const auto c = sample_gaussian_noise(4, 1.0, 100);
    for (int m = -4; m <= 4; ++m) {
        CHECK(a.spectrum.coeff(m) == b.spectrum.coeff(m));
        CHECK(a.spectrum.coeff(m) != c.spectrum.coeff(m));
    }
}

TEST_CASE("epsilon and failure bound formulas") {
    CHECK(epsilon_from_gaussian(10, 0.5, 0.1) == doctest::Approx(0.5 * 1.1 * std::sqrt(42.0)));
    CHECK(failure_probability_bound(10, 0.1) == doctest::Approx(std::exp(-2.0 * 21 * 0.01)));
}

TEST_CASE("bounded noise has the requested norm") {
    const DiscreteMeasure mu({{TorusPoint(0.2), {1, 0}}});
    NoiseSpec spec;
    spec.kind = NoiseKind::bounded;
    spec.epsilon = 0.3;
    spec.seed = 4;
    const auto bundle = make_observation(mu, 32, spec);
    CHECK(trig_l2_norm(bundle.noise.spectrum) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(bundle.epsilon == 0.3);
    CHECK(trig_l2_norm(bundle.observation.y - project(mu, 32)) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("tail frequency respects the bound") {
    const auto r = tail_montecarlo(4, 1.0, 0.3, 4000, 7);
    CHECK(r.pass);
    CHECK(r.frequency <= r.bound + 3 * r.standard_error);
}

TEST_CASE("noise kind names") {
    CHECK(noise_kind_from_string(to_string(NoiseKind::bounded)) == NoiseKind::bounded);
    CHECK_THROWS_AS(noise_kind_from_string("pink"), ParameterError);
}

}
