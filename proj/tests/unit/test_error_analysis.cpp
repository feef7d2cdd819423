#include <doctest.h>

#include <cmath>

#include "spikesolve/error_analysis.hpp"
#include "spikesolve/errors.hpp"
#include "spikesolve/rng.hpp"

using namespace spikesolve;

namespace {

double brute_sup(const Kernel& K, const DiscreteMeasure& nu, int G) {
    double best = 0.0;
    for (int k = 0; k < G; ++k) {
        const double x = static_cast<double>(k) / G;
        complex s{};
        for (const auto& sp : nu.spikes()) s += sp.amplitude * K(x - sp.position.value());
        best = std::max(best, std::abs(s));
    }
    return best;
}

}  // namespace

TEST_SUITE("error_analysis") {

TEST_CASE("near and far classification") {
    const int M = 100;
    const std::vector<TorusPoint> support{TorusPoint(0.2), TorusPoint(0.7)};
    const auto nb = neighborhoods(support, M);
    CHECK(nb.radius == doctest::Approx(0.0016));
    CHECK(nb.pairwise_disjoint());
    CHECK(nb.classify(TorusPoint(0.2015)) == std::optional<std::size_t>(0));
    CHECK(nb.classify(TorusPoint(0.2016)) == std::optional<std::size_t>(0));
    CHECK_FALSE(nb.classify(TorusPoint(0.2017)).has_value());
    CHECK(nb.classify(TorusPoint(0.699)) == std::optional<std::size_t>(1));

    const DiscreteMeasure nu({{TorusPoint(0.201), {0, 2}},
                              {TorusPoint(0.699), {-1, 0}},
                              {TorusPoint(0.5), {3, 4}}});
    CHECK(far_mass(nu, nb) == doctest::Approx(5.0));
    CHECK(near_mass(nu, nb) == doctest::Approx(3.0));
    CHECK(near_second_moment(nu, nb) == doctest::Approx(2.0 * 1e-6 + 1.0 * 1e-6));
}

TEST_CASE("smoothed error against brute-force convolution") {
    CounterRng rng(3);
    std::vector<Spike> s;
    for (int j = 0; j < 5; ++j) s.push_back({TorusPoint(rng.uniform()), rng.normal_pair()});
    const DiscreteMeasure nu(s);
    const int M = 32;
    for (const Kernel& K : {make_kernel(KernelFamily::fejer, 64), make_kernel(KernelFamily::bump, 64)}) {
        const auto grid = smoothed_error_grid(K, M);
        const auto e = smoothed_error(K, nu, grid);
        const double brute = brute_sup(K, nu, 1 << 14);
        CHECK(e.estimate >= brute * (1 - 1e-9));
        CHECK(e.estimate <= brute * (1 + 1e-3));
        CHECK(e.upper_bound >= e.estimate);
    }
}

TEST_CASE("difference form matches the explicit difference") {
    const DiscreteMeasure mu0({{TorusPoint(0.25), {1, 0}}});
    const DiscreteMeasure mu({{TorusPoint(0.2501), {0.9, 0}}});
    const Kernel K = make_kernel(KernelFamily::fejer, 40);
    const auto a = smoothed_error(K, mu, mu0, 4096);
    const auto b = smoothed_error(K, mu - mu0, 4096);
    CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
}

TEST_CASE("kernel factor and right-hand side") {
    const int M = 16;
    const Kernel F = make_kernel(KernelFamily::fejer, M);
    // Fejer: |F| = M + 1 at 0; the factor is at least that.
    const double kf = kernel_factor(F, M);
    CHECK(kf >= M + 1.0);
    CHECK(smoothed_error_bound(F, M, 0.5, 3.0) == doctest::Approx(1.5 * kf));
    CHECK(smoothed_error_bound(F, M, 0.0) == 0.0);
}

TEST_CASE("decomposition bounds the smoothed error at its maximizer") {
    const int M = 64;
    const std::vector<TorusPoint> support{TorusPoint(0.1), TorusPoint(0.6)};
    const auto nb = neighborhoods(support, M);
    const DiscreteMeasure nu({{TorusPoint(0.1003), {0.2, 0.1}},
                              {TorusPoint(0.1), {-0.19, -0.1}},
                              {TorusPoint(0.6), {0.05, 0}},
                              {TorusPoint(0.35), {0.01, 0}}});
    for (auto fam : {KernelFamily::fejer, KernelFamily::dirichlet, KernelFamily::bump}) {
        const Kernel K = make_kernel(fam, 2 * M);
        const auto d = proof_decomposition(K, nu.canonical(), nb);
        CHECK(d.value <= d.total() * (1 + 1e-9));
        CHECK(d.far_term >= 0.0);
    }
}

TEST_CASE("log-log slope") {
    const std::vector<double> x{1, 2, 4, 8};
    const std::vector<double> y{3, 12, 48, 192};
    CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("kernel families") {
    CHECK(kernel_family_from_string("bump") == KernelFamily::bump);
    CHECK(to_string(KernelFamily::dirichlet) == "dirichlet");
    CHECK_THROWS_AS(kernel_family_from_string("gauss"), ParameterError);
}

}
