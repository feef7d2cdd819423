#include <doctest.h>

#include <cmath>

#include "spikesolve/errors.hpp"
#include "spikesolve/rng.hpp"
#include "spikesolve/sampling.hpp"
#include "spikesolve/torus.hpp"

using namespace spikesolve;

namespace {

DiscreteMeasure random_measure(int J, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Spike> s;
    for (int j = 0; j < J; ++j) s.push_back({TorusPoint(rng.uniform()), rng.normal_pair()});
    return DiscreteMeasure(std::move(s));
}

}  // namespace

TEST_SUITE("torus") {

TEST_CASE("wrap and torus distance") {
    CHECK(wrap_unit(1.25) == doctest::Approx(0.25));
    CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
    CHECK(wrap_unit(3.0) == 0.0);
    CHECK(torus_distance(TorusPoint(0.05), TorusPoint(0.95)) == doctest::Approx(0.1));
    CHECK(signed_offset(TorusPoint(0.95), TorusPoint(0.05)) == doctest::Approx(0.1));
    CHECK(signed_offset(TorusPoint(0.05), TorusPoint(0.95)) == doctest::Approx(-0.1));
}

TEST_CASE("torus distance is a metric") {
    CounterRng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const TorusPoint x(rng.uniform(-3, 3)), y(rng.uniform(-3, 3)), z(rng.uniform(-3, 3));
        const double dxy = torus_distance(x, y);
        CHECK(dxy >= 0.0);
        CHECK(dxy <= 0.5);
        CHECK(dxy == torus_distance(y, x));
        CHECK(torus_distance(x, x) == 0.0);
        CHECK(torus_distance(x, z) <= dxy + torus_distance(y, z) + 1e-15);
    }
}

TEST_CASE("projection matches a direct exponential sum") {
    const auto mu = random_measure(7, 3);
    const int M = 20;
    const TrigPoly p = project(mu, M);
    for (int m = -M; m <= M; ++m) {
        complex direct{};
        for (const auto& s : mu.spikes()) {
            const double t = -2.0 * M_PI * m * s.position.value();
            direct += s.amplitude * complex(std::cos(t), std::sin(t));
        }
        CHECK(std::abs(p.coeff(m) - direct) < 1e-12);
        CHECK(std::abs(fourier_coeff(mu, m) - direct) < 1e-12);
    }
}

TEST_CASE("projection is linear") {
    const auto a = random_measure(5, 1);
    const auto b = random_measure(6, 2);
    const complex s(0.3, -1.7);
    const TrigPoly lhs = project(a + s * b, 16);
    const TrigPoly rhs = project(a, 16) + s * project(b, 16);
    for (int m = -16; m <= 16; ++m) CHECK(std::abs(lhs.coeff(m) - rhs.coeff(m)) < 1e-12);
}

TEST_CASE("evaluation agrees with direct summation and the FFT grid") {
    const auto p = project(random_measure(4, 9), 12);
    const auto grid = evaluate_on_grid(p, 64);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = static_cast<double>(k) / 64.0;
        complex direct{};
        for (int m = -12; m <= 12; ++m) direct += p.coeff(m) * std::polar(1.0, 2.0 * M_PI * m * x);
        CHECK(std::abs(grid[k] - direct) < 1e-11);
        CHECK(std::abs(p(x) - direct) < 1e-11);
    }
}

TEST_CASE("Parseval against a Riemann sum") {
    const auto p = project(random_measure(3, 5), 10);
    const auto grid = evaluate_on_grid(p, 256);
    double s = 0.0;
    for (auto v : grid) s += std::norm(v);
    CHECK(trig_l2_norm(p) == doctest::Approx(std::sqrt(s / 256.0)).epsilon(1e-12));
}

TEST_CASE("derivative against central differences") {
    const auto p = project(random_measure(3, 8), 9);
    const auto dp = trig_derivative(p, 1);
    const double h = 1e-6;
    for (double x : {0.1, 0.37, 0.8}) {
        const complex fd = (p(x + h) - p(x - h)) / (2.0 * h);
        CHECK(std::abs(dp(x) - fd) < 1e-5 * std::abs(dp(x)) + 1e-6);
    }
}

TEST_CASE("canonical form merges and drops") {
    DiscreteMeasure mu({{TorusPoint(0.3), {1, 0}}, {TorusPoint(0.3 + 1e-12), {2, 0}},
                        {TorusPoint(0.1), {0, 0}}, {TorusPoint(0.9), {0, 1}}});
    const auto c = mu.canonical();
    REQUIRE(c.size() == 2);
    CHECK(c.spikes()[0].position.value() == doctest::Approx(0.3));
    CHECK(c.spikes()[0].amplitude.real() == doctest::Approx(3.0));
    CHECK(total_variation(c) == doctest::Approx(4.0));
    CHECK(difference(mu, mu).empty());
}

TEST_CASE("separation") {
    std::vector<TorusPoint> s{TorusPoint(0.0), TorusPoint(0.5), TorusPoint(0.98)};
    CHECK(min_separation(s) == doctest::Approx(0.02));
    CHECK(satisfies_separation(s, 100));
    CHECK_FALSE(satisfies_separation(s, 99));
}

TEST_CASE("sup norm brackets the true maximum") {
    // |p| for p = 1 + e^{2 pi i x} peaks at exactly 2.
    TrigPoly p(1, {0, 1, 1});
    const auto s = sup_norm(p, 64);
    CHECK(s.grid_max <= 2.0 + 1e-15);
    CHECK(s.upper_bound >= 2.0);
    CHECK(s.certified);
    CHECK_THROWS_AS(sup_norm(p, 8), ParameterError);
    const auto peak = global_peak(TrigPoly(1, {0, 1, complex(0, 1)}), 64);
    CHECK(peak.modulus == doctest::Approx(2.0).epsilon(1e-12));
}

}
