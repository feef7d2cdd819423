#include <doctest.h>

#include <cmath>

#include "spikesolve/certificate.hpp"
#include "spikesolve/errors.hpp"
#include "spikesolve/instances.hpp"
#include "spikesolve/rng.hpp"
#include "spikesolve/sampling.hpp"

using namespace spikesolve;

namespace {

/// G^{(l)}(x) from coefficients obtained by exact midpoint quadrature of the product formula.
struct SpectralG {
    int M;
    std::vector<double> c;  // c[m], m = 0..M, real and even

    explicit SpectralG(int M_) : M(M_), c(static_cast<std::size_t>(M_) + 1) {
        const int n = M / 2 + 1;
        const int Q = 8 * (M + 1);
        for (int q = 0; q < Q; ++q) {
            const double x = (q + 0.5) / Q;
            const double r = std::sin(n * M_PI * x) / (n * std::sin(M_PI * x));
            const double g = r * r * r * r;
            for (int m = 0; m <= M; ++m) c[static_cast<std::size_t>(m)] += g * std::cos(2 * M_PI * m * x) / Q;
        }
    }

    double operator()(double x, int order) const {
        double s = order == 0 ? c[0] : 0.0;
        for (int m = 1; m <= M; ++m) {
            const double w = 2 * M_PI * m;
            const double t = w * x;
            const double cm = 2.0 * c[static_cast<std::size_t>(m)];
            switch (order) {
                case 0: s += cm * std::cos(t); break;
                case 1: s -= cm * w * std::sin(t); break;
                default: s -= cm * w * w * std::cos(t); break;
            }
        }
        return s;
    }
};

Eigen::VectorXcd random_vec(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = rng.normal_pair();
    return v;
}

}  // namespace

TEST_SUITE("certificate") {

TEST_CASE("matrices agree with an independent spectral assembly") {
    const int M = 40;
    const auto support = random_separated_support(5, M, 1.2, 17);
    const auto mats = build_matrices(support, M);
    const SpectralG g(M);
    for (std::size_t j = 0; j < support.size(); ++j) {
        for (std::size_t k = 0; k < support.size(); ++k) {
            const double d = support[j].value() - support[k].value();
            const auto J = static_cast<Eigen::Index>(j), K = static_cast<Eigen::Index>(k);
            CHECK(mats.D0(J, K) == doctest::Approx(g(d, 0)).epsilon(1e-11));
            CHECK(std::abs(mats.D1(J, K) - g(d, 1)) < 1e-10 * M);
            CHECK(std::abs(mats.D2(J, K) - g(d, 2)) < 1e-10 * M * M);
        }
    }
    CHECK_FALSE(mats.theory_regime);
}

TEST_CASE("coefficients multiply back to the data") {
    const int M = 128;
    const auto support = random_separated_support(8, M, 1.0, 5);
    const auto mats = build_matrices(support, M);
    const auto a = random_vec(support.size(), 1);
    const Eigen::VectorXcd b = double(M) * random_vec(support.size(), 2);
    const auto sol = solve_coefficients(mats, a, b);
    const Eigen::VectorXcd ra = mats.D0 * sol.alpha + mats.D1 * sol.beta - a;
    const Eigen::VectorXcd rb = mats.D1 * sol.alpha + mats.D2 * sol.beta - b;
    CHECK(ra.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(rb.cwiseAbs().maxCoeff() / M < 1e-10);
    CHECK(sol.residual < 1e-10);
    CHECK(sol.theory_regime);
}

TEST_CASE("certificate interpolates values and derivatives") {
    const int M = 128;
    const auto support = random_separated_support(6, M, 1.0, 8);
    const auto a = random_vec(support.size(), 3);
    const Eigen::VectorXcd b = double(M) * random_vec(support.size(), 4);
    const Certificate f = make_certificate(support, a, b, M);
    for (std::size_t j = 0; j < support.size(); ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        CHECK(std::abs(f.eval(support[j].value()) - a(J)) < 1e-10);
        CHECK(std::abs(f.eval(support[j].value(), 1) - b(J)) / M < 1e-10);
    }
    // Spectral form evaluates to the same function.
    const TrigPoly p = f.spectral_form();
    CHECK(p.degree() <= M);
    for (double x : {0.11, 0.52, 0.93}) CHECK(std::abs(p(x) - f.eval(x)) < 1e-10);
    CHECK(verify_interpolation(f, a, b, 1e-8).pass);
}

TEST_CASE("dual certificate stays below one off the support") {
    const int M = 128;
    const auto support = random_separated_support(5, M, 1.0, 21);
    Eigen::VectorXcd v = random_vec(support.size(), 6);
    for (auto& x : v) x /= std::abs(x);
    const auto r = dual_certificate(support, v, M, std::size_t{1} << 15);
    CHECK(r.strictly_below_one);
    CHECK(r.sup_outside_neighborhoods < 1.0);
}

TEST_CASE("a single spike certifies with the kernel itself") {
    const int M = 128;
    const std::vector<TorusPoint> support{TorusPoint(0.3)};
    Eigen::VectorXcd v(1);
    v(0) = 1.0;
    const auto r = dual_certificate(support, v, M, std::size_t{1} << 14);
    const TrigPoly f = r.certificate.spectral_form();
    const TrigPoly g = g_kernel(M).spectral_form();
    for (int m = -M; m <= M; ++m) {
        CHECK(std::abs(f.coeff(m) - g.coeff(m) * std::polar(1.0, -2 * M_PI * m * 0.3)) < 1e-13);
    }
    CHECK(std::abs(f(0.3)) == doctest::Approx(1.0).epsilon(1e-12));
    const SupNorm s = sup_norm(f, std::size_t{1} << 14);
    CHECK(s.grid_max <= 1.0 + 1e-12);
    CHECK(s.upper_bound >= 1.0 - 1e-12);
}

TEST_CASE("separation violations are rejected") {
    std::vector<TorusPoint> s{TorusPoint(0.1), TorusPoint(0.1 + 1.0 / 128)};
    CHECK_THROWS_AS(build_matrices(s, 128), ParameterError);
}

}
