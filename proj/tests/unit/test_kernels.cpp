#include <doctest.h>

#include <cmath>

#include "spikesolve/errors.hpp"
#include "spikesolve/kernels.hpp"

using namespace spikesolve;

namespace {

double g_direct(int M, double x) {
    const int n = M / 2 + 1;
    if (std::abs(std::sin(M_PI * x)) < 1e-14) return 1.0;
    const double r = std::sin(n * M_PI * x) / (n * std::sin(M_PI * x));
    return r * r * r * r;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("G matches the closed form and has unit peak") {
    for (int M : {8, 33, 128}) {
        const Kernel G = g_kernel(M);
        CHECK(G(0.0) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(G.spectral_form().effective_degree(1e-15) <= M);
        for (double x : {0.003, 0.05, 0.21, 0.5, 0.77}) CHECK(std::abs(G(x) - g_direct(M, x)) < 1e-12);
    }
    CHECK_THROWS_AS(g_kernel(0), ParameterError);
}

TEST_CASE("G derivatives against finite differences") {
    const int M = 64;
    const Kernel G = g_kernel(M);
    const double h = 2e-5;
    const double fd2 = (g_direct(M, h) - 2.0 + g_direct(M, -h)) / (h * h);
    CHECK(G(0.0, 2) == doctest::Approx(fd2).epsilon(1e-5));
    CHECK(std::abs(G(0.0, 1)) < 1e-9);
    CHECK(G(0.0, 2) < 0.0);
    for (double x : {0.01, 0.1}) {
        const double fd1 = (g_direct(M, x + 1e-6) - g_direct(M, x - 1e-6)) / 2e-6;
        CHECK(G(x, 1) == doctest::Approx(fd1).epsilon(1e-6));
    }
}

TEST_CASE("Dirichlet identity") {
    const int N = 16;
    const Kernel D = dirichlet_kernel(N);
    for (double x : {0.013, 0.2, 0.49}) {
        const double closed = std::sin((2 * N + 1) * M_PI * x) / std::sin(M_PI * x);
        CHECK(D(x) == doctest::Approx(closed).epsilon(1e-12));
        CHECK(D.spatial_eval(x) == doctest::Approx(closed).epsilon(1e-12));
    }
    CHECK(D(0.0) == doctest::Approx(2 * N + 1));
}

TEST_CASE("Fejer kernel is the average of Dirichlet kernels") {
    const int N = 12;
    const Kernel F = fejer_kernel(N);
    for (double x : {0.02, 0.3}) {
        double avg = 1.0;
        for (int k = 1; k <= N; ++k) avg += dirichlet_kernel(k)(x);
        avg /= N + 1;
        CHECK(F(x) == doctest::Approx(avg).epsilon(1e-12));
        CHECK(F(x) >= 0.0);
    }
}

TEST_CASE("periodized bump") {
    const Kernel B = periodized_bump(100, 4.0);
    CHECK(B(0.0) == doctest::Approx(1.0));
    CHECK(B(1.0 / 400.0 + 1e-9) == 0.0);
    CHECK(B(0.001) == doctest::Approx(std::pow(1.0 + std::cos(M_PI * 0.4), 2) / 4.0));
    const double h = 1e-7;
    CHECK(B(0.001, 1) == doctest::Approx((B(0.001 + h) - B(0.001 - h)) / (2 * h)).epsilon(1e-5));
    CHECK_THROWS_AS(periodized_bump(10, 2.0), ParameterError);
}

TEST_CASE("Bernstein chain with the 2 pi factor") {
    const auto r = bernstein_check(g_kernel(32).spectral_form());
    CHECK(r.corrected_holds);
    CHECK(r.norms[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("kernel sup norms") {
    const auto s = sup_norm(fejer_kernel(20));
    CHECK(s.grid_max == doctest::Approx(21.0));
    CHECK(s.upper_bound >= 21.0);
}

}
