#include "spikesolve/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spikesolve/errors.hpp"

namespace spikesolve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_real_even(const TrigPoly& p) {
    for (int m = 0; m <= p.degree(); ++m) {
        const complex a = p.coeff(m);
        const complex b = p.coeff(-m);
        if (a.imag() != 0.0 || b.imag() != 0.0 || a.real() != b.real()) return false;
    }
    return true;
}

// Orders 0..3 of sum_m h_m e^{2 pi i m x} for real even coefficients h (|m| <= N),
// written as cosine/sine series.
std::array<double, 4> even_series_derivatives(const std::vector<double>& half, double x) {
    std::array<double, 4> d{half.empty() ? 0.0 : half[0], 0.0, 0.0, 0.0};
    const complex step = detail::unit_phasor(x);
    complex w;
    for (std::size_t m = 1; m < half.size(); ++m) {
        if ((m - 1) % 32 == 0) w = detail::unit_phasor(static_cast<double>(m) * x);
        else w *= step;
        const double h = half[m];
        const double om = kTwoPi * static_cast<double>(m);
        const double c = w.real();
        const double s = w.imag();
        d[0] += 2.0 * h * c;
        d[1] -= 2.0 * h * om * s;
        d[2] -= 2.0 * h * om * om * c;
        d[3] += 2.0 * h * om * om * om * s;
    }
    return d;
}

std::array<double, 4> general_series_derivatives(const TrigPoly& p, double x) {
    std::array<complex, 4> d{};
    detail::for_each_phasor(p.degree(), x, [&](int m, complex w) {
        complex t = p.coeff(m) * w;
        const complex f{0.0, kTwoPi * m};
        for (auto& v : d) {
            v += t;
            t *= f;
        }
    });
    return {d[0].real(), d[1].real(), d[2].real(), d[3].real()};
}

double centered(double x) { return signed_offset(TorusPoint(0.0), TorusPoint(x)); }

}  // namespace

// ---------------------------------------------------------------------------
// Kernel

Kernel Kernel::from_spectral(std::string name, TrigPoly coeffs, int nominal_scale,
                             SpatialFn closed_form, int closed_form_max_order) {
    Kernel k;
    k.name_ = std::move(name);
    k.scale_ = nominal_scale;
    if (is_real_even(coeffs)) {
        k.even_half_.resize(static_cast<std::size_t>(coeffs.degree()) + 1);
        for (int m = 0; m <= coeffs.degree(); ++m) {
            k.even_half_[static_cast<std::size_t>(m)] = coeffs.coeff(m).real();
        }
    }
    k.spectral_ = std::move(coeffs);
    if (closed_form) {
        k.spatial_ = std::move(closed_form);
        k.spatial_max_order_ = closed_form_max_order;
    }
    return k;
}

Kernel Kernel::from_spatial(std::string name, SpatialFn fn, int max_order, int nominal_scale,
                            double support_halfwidth) {
    Kernel k;
    k.name_ = std::move(name);
    k.scale_ = nominal_scale;
    k.spatial_ = std::move(fn);
    k.spatial_max_order_ = max_order;
    k.support_halfwidth_ = std::min(0.5, support_halfwidth);
    return k;
}

double Kernel::spatial_eval(double x, int order) const {
    if (!spatial_) throw ParameterError("kernel '" + name_ + "' has no spatial form");
    if (order < 0 || order > spatial_max_order_) {
        throw ParameterError("kernel '" + name_ + "' spatial form lacks derivative order " +
                             std::to_string(order));
    }
    return spatial_(x, order);
}

int Kernel::max_order() const noexcept { return spectral_ ? 3 : spatial_max_order_; }

double Kernel::operator()(double x, int order) const {
    if (order < 0 || order > max_order()) {
        throw ParameterError("kernel '" + name_ + "' lacks derivative order " +
                             std::to_string(order));
    }
    if (spectral_) return derivatives(x)[static_cast<std::size_t>(order)];
    return spatial_(x, order);
}

std::array<double, 4> Kernel::derivatives(double x) const {
    if (spectral_) {
        return even_half_.empty() ? general_series_derivatives(*spectral_, x)
                                  : even_series_derivatives(even_half_, x);
    }
    std::array<double, 4> d{kNaN, kNaN, kNaN, kNaN};
    for (int l = 0; l <= spatial_max_order_ && l < 4; ++l) {
        d[static_cast<std::size_t>(l)] = spatial_(x, l);
    }
    return d;
}

std::size_t Kernel::default_grid() const {
    if (spectral_) return min_sup_grid(spectral_->effective_degree());
    // At least 256 samples across the support.
    const double g = std::ceil(256.0 / (2.0 * support_halfwidth_));
    return std::max<std::size_t>(4096, static_cast<std::size_t>(g));
}

// ---------------------------------------------------------------------------
// Families

Kernel g_kernel(int M) {
    if (M < 1) throw ParameterError("g_kernel needs M >= 1, got " + std::to_string(M));
    const int half = M / 2;
    const int n = half + 1;
    const double nd = static_cast<double>(n);
    // Squared normalized Dirichlet ratio: coefficients (1 - |k|/n)/n on |k| <= n-1.
    std::vector<double> tri(2 * static_cast<std::size_t>(half) + 1);
    for (int k = -half; k <= half; ++k) {
        tri[static_cast<std::size_t>(k + half)] = (1.0 - std::abs(k) / nd) / nd;
    }
    // Fourth power = self-convolution of the squared ratio's coefficients.
    TrigPoly g(M);
    for (int a = -half; a <= half; ++a) {
        for (int b = -half; b <= half; ++b) {
            g.coeff_ref(a + b) += tri[static_cast<std::size_t>(a + half)] *
                                  tri[static_cast<std::size_t>(b + half)];
        }
    }
    auto closed = [nd](double x, int) {
        const double t = centered(x);
        const double den = nd * std::sin(kPi * t);
        if (std::abs(t) < 1e-12) return 1.0;
        const double r = std::sin(nd * kPi * t) / den;
        return r * r * r * r;
    };
    return Kernel::from_spectral("G", std::move(g), M, closed, 0);
}

double g_derivative_eval(int M, int order, TorusPoint x) {
    if (order < 0 || order > 3) throw ParameterError("G derivative order must be in 0..3");
    return g_kernel(M)(x.value(), order);
}

Kernel dirichlet_kernel(int N) {
    if (N < 1) throw ParameterError("dirichlet_kernel needs N >= 1");
    TrigPoly p(N, std::vector<complex>(2 * static_cast<std::size_t>(N) + 1, complex{1.0, 0.0}));
    const double width = 2.0 * N + 1.0;
    auto closed = [width](double x, int) {
        const double t = centered(x);
        if (std::abs(t) < 1e-12) return width;
        return std::sin(width * kPi * t) / std::sin(kPi * t);
    };
    return Kernel::from_spectral("dirichlet", std::move(p), N, closed, 0);
}

Kernel fejer_kernel(int N) {
    if (N < 1) throw ParameterError("fejer_kernel needs N >= 1");
    TrigPoly p(N);
    const double n1 = N + 1.0;
    for (int m = -N; m <= N; ++m) p.coeff_ref(m) = 1.0 - std::abs(m) / n1;
    auto closed = [n1](double x, int) {
        const double t = centered(x);
        if (std::abs(t) < 1e-12) return n1;
        const double r = std::sin(n1 * kPi * t) / std::sin(kPi * t);
        return r * r / n1;
    };
    return Kernel::from_spectral("fejer", std::move(p), N, closed, 0);
}

double bump_profile(double u, double L, int order) {
    if (std::abs(u) > 1.0 / L) return 0.0;
    const double th = kPi * L * u;
    const double c = std::cos(th);
    const double s = std::sin(th);
    switch (order) {
        case 0: return (1.0 + c) * (1.0 + c) / 4.0;
        case 1: return -(kPi * L / 2.0) * (1.0 + c) * s;
        case 2: return -(kPi * kPi * L * L / 2.0) * (c + std::cos(2.0 * th));
        case 3: return (kPi * kPi * kPi * L * L * L / 2.0) * (s + 2.0 * std::sin(2.0 * th));
        default: throw ParameterError("bump profile derivative order must be in 0..3");
    }
}

std::array<double, 3> bump_profile_sup(double L) {
    // |k'| peaks at pi L u = pi/3; |k''| at u = 0.
    return {1.0, kPi * L * 3.0 * std::sqrt(3.0) / 8.0, kPi * kPi * L * L};
}

Kernel periodized_bump(int N, double L) {
    if (N < 1) throw ParameterError("periodized_bump needs N >= 1");
    if (!(L > 2.0)) throw ParameterError("periodized_bump needs L > 2, got " + std::to_string(L));
    const double Nd = N;
    auto fn = [Nd, L](double x, int order) {
        const double t = centered(x);
        return std::pow(Nd, order) * bump_profile(Nd * t, L, order);
    };
    return Kernel::from_spatial("bump", fn, 2, N, 1.0 / (L * Nd));
}

complex convolve_at(const Kernel& K, const DiscreteMeasure& nu, TorusPoint x) {
    complex sum{};
    for (const auto& s : nu.spikes()) {
        sum += s.amplitude * K(signed_offset(s.position, x), 0);
    }
    return sum;
}

SupNorm sup_norm(const Kernel& K, int order, std::size_t grid_size) {
    if (K.has_spectral()) return sup_norm(trig_derivative(K.spectral_form(), order), grid_size);
    if (order > K.max_order()) {
        throw ParameterError("kernel '" + K.name() + "' lacks derivative order " +
                             std::to_string(order));
    }
    SupNorm out;
    out.grid_size = grid_size;
    const double h = 1.0 / static_cast<double>(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double v = std::abs(K.spatial_eval(static_cast<double>(k) * h, order));
        if (v > out.grid_max) {
            out.grid_max = v;
            out.argmax = static_cast<double>(k) * h;
        }
    }
    out.upper_bound = out.grid_max;
    out.correction = 1.0;
    out.certified = false;
    return out;
}

SupNorm sup_norm(const Kernel& K, int order) { return sup_norm(K, order, K.default_grid()); }

BernsteinReport bernstein_check(const TrigPoly& p) {
    BernsteinReport r;
    r.degree = p.effective_degree();
    const std::size_t grid = min_sup_grid(r.degree);
    for (int l = 0; l < 3; ++l) {
        const SupNorm s = sup_norm(trig_derivative(p, l), grid);
        r.norms[static_cast<std::size_t>(l)] = s.grid_max;
        r.upper_bounds[static_cast<std::size_t>(l)] = s.upper_bound;
    }
    const double N = r.degree;
    const double slack = 1.0 + 1e-12;
    r.literal_holds = r.norms[2] <= N * r.upper_bounds[1] * slack &&
                      r.norms[1] <= N * r.upper_bounds[0] * slack;
    const double tN = kTwoPi * N;
    r.corrected_holds = r.norms[2] <= tN * r.upper_bounds[1] * slack &&
                        r.norms[1] <= tN * r.upper_bounds[0] * slack;
    return r;
}

}  // namespace spikesolve
