#include <doctest.h>

#include <cmath>

#include "spikesolve/errors.hpp"
#include "spikesolve/instances.hpp"
#include "spikesolve/noise.hpp"
#include "spikesolve/solvers.hpp"

using namespace spikesolve;

TEST_SUITE("solvers") {

TEST_CASE("single spike soft thresholding") {
    // For y = P_M(c delta_s) the minimizer is a delta_s with a = c (1 - tau / ((2M+1)|c|))_+.
    const int M = 16;
    const complex c(1.2, -0.5);
    const Observation obs{project(DiscreteMeasure({{TorusPoint(0.3141), c}}), M)};
    const double tau = 4.0;
    const auto r = solve_tikhonov(obs, tau);
    REQUIRE(r.converged);
    REQUIRE(r.measure.size() == 1);
    const complex expect = c * (1.0 - tau / ((2 * M + 1) * std::abs(c)));
    CHECK(r.measure.spikes()[0].position.value() == doctest::Approx(0.3141).epsilon(1e-9));
    CHECK(std::abs(r.measure.spikes()[0].amplitude - expect) < 1e-9);
    CHECK(r.objective == doctest::Approx(tikhonov_objective(obs, tau, r.measure)).epsilon(1e-12));

    const double big = (2 * M + 1) * std::abs(c) * 1.01;
    const auto z = solve_tikhonov(obs, big);
    CHECK(z.measure.empty());
    CHECK(z.converged);
}

TEST_CASE("noiseless recovery of separated spikes") {
    const int M = 32;
    const auto mu0 = random_separated_measure(4, M, 1.5, 77, AmplitudeLaw::unit_phase);
    const Observation obs{project(mu0, M)};
    const auto r = solve_noiseless(obs);
    REQUIRE(r.converged);
    const auto mu = r.measure.canonical();
    REQUIRE(mu.size() == mu0.size());
    for (std::size_t j = 0; j < mu.size(); ++j) {
        CHECK(torus_distance(mu.spikes()[j].position, mu0.spikes()[j].position) < 1e-6);
        CHECK(std::abs(mu.spikes()[j].amplitude - mu0.spikes()[j].amplitude) < 1e-5);
    }
    CHECK(r.residual_l2 <= noiseless_delta(obs) * (1 + 1e-6));
}

TEST_CASE("constrained problem meets the residual bound") {
    const int M = 24;
    const auto mu0 = random_separated_measure(3, M, 1.5, 3, AmplitudeLaw::unit_phase);
    NoiseSpec spec;
    spec.kind = NoiseKind::bounded;
    spec.epsilon = 0.05 * trig_l2_norm(project(mu0, M));
    spec.seed = 9;
    const auto b = make_observation(mu0, M, spec);
    const auto r = solve_constrained(b.observation, b.epsilon);
    CHECK(r.converged);
    CHECK(r.residual_l2 <= b.epsilon * (1 + 1e-9));
    CHECK(r.residual_l2 >= b.epsilon * (1 - 2e-3));
    CHECK(total_variation(r.measure) <= total_variation(mu0) + 1e-9);

    const auto zero = solve_constrained(b.observation, 2.0 * trig_l2_norm(b.observation.y));
    CHECK(zero.measure.empty());
    CHECK_THROWS_AS(solve_constrained(b.observation, -1.0), ParameterError);
}

TEST_CASE("duality gap certifies the penalized solution") {
    const int M = 12;
    const auto mu0 = random_separated_measure(3, M, 1.2, 4, AmplitudeLaw::complex_gaussian);
    NoiseSpec spec;
    spec.sigma = 0.05;
    spec.seed = 2;
    const auto b = make_observation(mu0, M, spec);
    const double tau = 0.2;
    const auto r = solve_tikhonov(b.observation, tau);
    CHECK(r.converged);
    const double gap = duality_gap(b.observation, tau, r.measure);
    CHECK(gap >= -1e-12);
    CHECK(gap <= 1e-9 * r.objective);
    CHECK(duality_gap(b.observation, tau, DiscreteMeasure{}) > gap);
    // The objective trace never increases.
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
        CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-15);
    }
}

TEST_CASE("grid-restricted solver agrees with the Lasso oracle") {
    const int M = 8;
    const auto mu0 = random_separated_measure(2, M, 1.2, 12, AmplitudeLaw::unit_phase);
    NoiseSpec spec;
    spec.sigma = 0.05;
    spec.seed = 5;
    const auto b = make_observation(mu0, M, spec);
    SolverConfig cfg;
    cfg.restrict_to_grid = true;
    cfg.max_iterations = 2000;
    const double tau = 1.0;
    const auto r = solve_tikhonov(b.observation, tau, cfg);
    const auto o = grid_lasso_oracle(b.observation, tau, static_cast<std::size_t>(cfg.grid_factor) * (2 * M + 1));
    REQUIRE(o.converged);
    CHECK(r.objective == doctest::Approx(o.objective).epsilon(1e-8));
}

TEST_CASE("approximation predicate") {
    const DiscreteMeasure mu0({{TorusPoint(0.5), {1, 0}}});
    const DiscreteMeasure mu({{TorusPoint(0.5), {1.01, 0}}});
    const auto ok = is_approximation(mu, mu0, 10, 0.1);
    CHECK(ok.pass());
    CHECK(ok.l2_distance == doctest::Approx(0.01 * std::sqrt(21.0)));
    CHECK_FALSE(is_approximation(mu, mu0, 10, 1e-3).pass());
}

TEST_CASE("config validation") {
    SolverConfig c;
    c.grid_factor = 1;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    const Observation obs{project(DiscreteMeasure({{TorusPoint(0.1), {1, 0}}}), 4)};
    CHECK_THROWS_AS(solve_tikhonov(obs, -1.0), ParameterError);
}

}
