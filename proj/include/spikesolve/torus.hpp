#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace spikesolve {

using complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Positions closer than this (torus distance) are combined by canonicalization.
inline constexpr double kSpikeMergeTolerance = 1e-9;

/// Canonical representative of x modulo 1, in [0, 1).
double wrap_unit(double x) noexcept;

/// A point of the torus R/Z, stored as its representative in [0, 1).
class TorusPoint {
public:
    constexpr TorusPoint() noexcept = default;
    explicit TorusPoint(double x) noexcept : value_(wrap_unit(x)) {}

    constexpr double value() const noexcept { return value_; }

    TorusPoint operator+(double shift) const noexcept { return TorusPoint(value_ + shift); }
    TorusPoint operator-(double shift) const noexcept { return TorusPoint(value_ - shift); }

    friend constexpr bool operator==(TorusPoint, TorusPoint) noexcept = default;

private:
    double value_ = 0.0;
};

/// Signed displacement from `from` to `to`, in [-1/2, 1/2).
double signed_offset(TorusPoint from, TorusPoint to) noexcept;

/// Distance on the torus: min(|x - y|, 1 - |x - y|), in [0, 1/2].
double torus_distance(TorusPoint x, TorusPoint y) noexcept;

struct Spike {
    TorusPoint position;
    complex amplitude;
};

/// Finite weighted sum of Dirac masses on the torus.
///
/// Construction keeps spikes as given. `canonical()` sorts by position, combines
/// spikes closer than the merge tolerance and drops zero amplitudes; most
/// error functionals expect canonical input.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<Spike> spikes) : spikes_(std::move(spikes)) {}

    const std::vector<Spike>& spikes() const noexcept { return spikes_; }
    std::size_t size() const noexcept { return spikes_.size(); }
    bool empty() const noexcept { return spikes_.empty(); }

    std::vector<TorusPoint> support() const;

    DiscreteMeasure canonical(double merge_tolerance = kSpikeMergeTolerance) const;

    /// Disjoint-union sum (not canonicalized).
    friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b);
    friend DiscreteMeasure operator-(const DiscreteMeasure& a, const DiscreteMeasure& b);
    friend DiscreteMeasure operator*(complex scale, const DiscreteMeasure& a);

private:
    std::vector<Spike> spikes_;
};

/// Canonical form of a - b.
DiscreteMeasure difference(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Trigonometric polynomial sum_{m=-M}^{M} c_m e^{2 pi i m x}.
class TrigPoly {
public:
    TrigPoly() : TrigPoly(0) {}
    explicit TrigPoly(int degree);
    TrigPoly(int degree, std::vector<complex> coeffs);

    int degree() const noexcept { return degree_; }
    std::span<const complex> coeffs() const noexcept { return coeffs_; }
    std::span<complex> coeffs() noexcept { return coeffs_; }

    /// Coefficient of frequency m; zero outside [-M, M].
    complex coeff(int m) const noexcept;
    complex& coeff_ref(int m);

    complex operator()(double x) const;
    complex operator()(TorusPoint x) const { return (*this)(x.value()); }

    /// Highest |m| with a coefficient above `tol` in modulus (0 for constants and zero).
    int effective_degree(double tol = 0.0) const noexcept;

    /// Same polynomial padded (or truncated) to a new degree.
    TrigPoly resized(int degree) const;

    TrigPoly& operator+=(const TrigPoly& other);
    TrigPoly& operator-=(const TrigPoly& other);
    TrigPoly& operator*=(complex scale);

    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
    friend TrigPoly operator*(complex s, TrigPoly a) { return a *= s; }

private:
    int degree_;
    std::vector<complex> coeffs_;
};

// ---------------------------------------------------------------------------
// Operations

/// Minimum pairwise torus distance; +infinity for fewer than two points.
double min_separation(std::span<const TorusPoint> support);

/// min_separation(support) >= 2/M.
bool satisfies_separation(std::span<const TorusPoint> support, int M);

double total_variation(const DiscreteMeasure& mu) noexcept;

/// mu_hat(m) = sum_j c_j e^{-2 pi i m s_j}.
complex fourier_coeff(const DiscreteMeasure& mu, int m);

/// P_M mu: the coefficients mu_hat(m), |m| <= M.
TrigPoly project(const DiscreteMeasure& mu, int M);

complex trig_eval(const TrigPoly& p, TorusPoint x);

/// Derivative of order `order` (0..3): coefficients times (2 pi i m)^order.
TrigPoly trig_derivative(const TrigPoly& p, int order);

/// L2(T) norm via Parseval.
double trig_l2_norm(const TrigPoly& p) noexcept;

namespace detail {

/// e^{2 pi i t}, with t reduced modulo 1 before the trigonometric call.
inline complex unit_phasor(double t) {
    const double r = t - std::floor(t);
    return std::polar(1.0, kTwoPi * r);
}

/// Calls fn(m, e^{2 pi i m x}) for m = -M..M. Uses a rotation recurrence that is
/// re-anchored every 32 steps so the accumulated rounding stays at a few ulps.
template <class Fn>
void for_each_phasor(int M, double x, Fn&& fn) {
    const complex step = unit_phasor(x);
    complex w;
    for (int m = -M; m <= M; ++m) {
        if ((m + M) % 32 == 0) {
            w = unit_phasor(static_cast<double>(m) * x);
        }
        fn(m, w);
        w *= step;
    }
}

}  // namespace detail

}  // namespace spikesolve
