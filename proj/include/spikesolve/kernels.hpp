#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "spikesolve/sampling.hpp"
#include "spikesolve/torus.hpp"

namespace spikesolve {

/// A real-valued 1-periodic smoothing kernel.
///
/// A kernel has a spectral form (a trigonometric polynomial), a closed-form
/// spatial evaluator, or both. Evaluation prefers the spectral form; the
/// spatial one is then kept as an independent cross-check.
class Kernel {
public:
    /// fn(x, order) returns the order-th derivative at x.
    using SpatialFn = std::function<double(double x, int order)>;

    static Kernel from_spectral(std::string name, TrigPoly coeffs, int nominal_scale,
                                SpatialFn closed_form = {}, int closed_form_max_order = 0);
    static Kernel from_spatial(std::string name, SpatialFn fn, int max_order, int nominal_scale,
                               double support_halfwidth);

    const std::string& name() const noexcept { return name_; }
    int nominal_scale() const noexcept { return scale_; }

    bool has_spectral() const noexcept { return spectral_.has_value(); }
    const TrigPoly& spectral_form() const { return spectral_.value(); }

    bool has_spatial() const noexcept { return static_cast<bool>(spatial_); }
    int spatial_max_order() const noexcept { return spatial_max_order_; }
    double spatial_eval(double x, int order = 0) const;

    /// Highest derivative order available (3 for spectral kernels).
    int max_order() const noexcept;

    /// Half-width of the support when compactly supported, 0.5 otherwise.
    double support_halfwidth() const noexcept { return support_halfwidth_; }

    double operator()(double x, int order = 0) const;

    /// All derivative orders 0..3 at x (orders beyond max_order() are NaN).
    std::array<double, 4> derivatives(double x) const;

    /// Grid size adequate for sampling this kernel's sup-norms.
    std::size_t default_grid() const;

private:
    Kernel() = default;

    std::string name_;
    int scale_ = 1;
    std::optional<TrigPoly> spectral_;
    // Nonnegative-frequency coefficients when the spectral form is real and even.
    std::vector<double> even_half_;
    SpatialFn spatial_;
    int spatial_max_order_ = -1;
    double support_halfwidth_ = 0.5;
};

/// The certificate kernel G(x) = (sin(n pi x) / (n sin(pi x)))^4 with n = floor(M/2) + 1,
/// a nonnegative trigonometric polynomial of degree 2 floor(M/2) <= M with G(0) = 1.
Kernel g_kernel(int M);

/// G^{(order)}(x) for order 0..3.
double g_derivative_eval(int M, int order, TorusPoint x);

/// sin((2N+1) pi x) / sin(pi x): coefficients 1 on [-N, N].
Kernel dirichlet_kernel(int N);

/// Fejer kernel with coefficients 1 - |m|/(N+1) on [-N, N].
Kernel fejer_kernel(int N);

/// Default bump profile k(u) = (1 + cos(pi L u))^2 / 4 on |u| <= 1/L.
double bump_profile(double u, double L, int order);

/// Sup-norms of the profile and its first two derivatives, in closed form.
std::array<double, 3> bump_profile_sup(double L);

/// 1-periodization of k(N x) with the default profile; derivative orders 0..2.
Kernel periodized_bump(int N, double L);

/// (K * nu)(x) = sum_j c_j K(x - s_j).
complex convolve_at(const Kernel& K, const DiscreteMeasure& nu, TorusPoint x);

/// Sampled sup-norm of K^{(order)}. Spectral kernels get the certified
/// Bernstein correction; spatial-only kernels report the plain grid maximum.
SupNorm sup_norm(const Kernel& K, int order, std::size_t grid_size);
SupNorm sup_norm(const Kernel& K, int order = 0);

struct BernsteinReport {
    int degree = 0;
    std::array<double, 3> norms{};         ///< grid estimates of |p|, |p'|, |p''|
    std::array<double, 3> upper_bounds{};  ///< certified upper bounds of the same
    bool literal_holds = false;            ///< |p''| <= N|p'| <= N^2 |p|
    bool corrected_holds = false;          ///< |p''| <= 2 pi N |p'| <= (2 pi N)^2 |p|
};

/// Checks the Bernstein chain for p both without and with the 2 pi factor
/// implied by the e^{2 pi i m x} convention. Left-hand sides use grid
/// estimates, right-hand sides certified upper bounds.
BernsteinReport bernstein_check(const TrigPoly& p);

}  // namespace spikesolve
