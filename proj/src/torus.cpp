#include "spikesolve/torus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikesolve/errors.hpp"

namespace spikesolve {

double wrap_unit(double x) noexcept {
    double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.
    if (r >= 1.0) r = 0.0;
    return r;
}

double signed_offset(TorusPoint from, TorusPoint to) noexcept {
    double d = to.value() - from.value();
    if (d >= 0.5) d -= 1.0;
    else if (d < -0.5) d += 1.0;
    return d;
}

double torus_distance(TorusPoint x, TorusPoint y) noexcept {
    const double d = std::abs(x.value() - y.value());
    return std::min(d, 1.0 - d);
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

std::vector<TorusPoint> DiscreteMeasure::support() const {
    std::vector<TorusPoint> out;
    out.reserve(spikes_.size());
    for (const auto& s : spikes_) out.push_back(s.position);
    return out;
}

DiscreteMeasure DiscreteMeasure::canonical(double merge_tolerance) const {
    std::vector<Spike> sorted = spikes_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Spike& a, const Spike& b) {
        return a.position.value() < b.position.value();
    });

    // Chain consecutive spikes whose gap is within tolerance.
    std::vector<std::vector<Spike>> groups;
    for (const auto& s : sorted) {
        if (!groups.empty() &&
            torus_distance(groups.back().back().position, s.position) <= merge_tolerance) {
            groups.back().push_back(s);
        } else {
            groups.push_back({s});
        }
    }
    if (groups.size() > 1 &&
        torus_distance(groups.back().back().position, groups.front().front().position) <=
            merge_tolerance) {
        auto tail = std::move(groups.back());
        groups.pop_back();
        tail.insert(tail.end(), groups.front().begin(), groups.front().end());
        groups.front() = std::move(tail);
    }

    std::vector<Spike> merged;
    merged.reserve(groups.size());
    for (const auto& g : groups) {
        complex amp{0.0, 0.0};
        double weight = 0.0;
        double offset = 0.0;
        const TorusPoint anchor = g.front().position;
        for (const auto& s : g) {
            amp += s.amplitude;
            const double w = std::abs(s.amplitude);
            weight += w;
            offset += w * signed_offset(anchor, s.position);
        }
        if (amp == complex{0.0, 0.0}) continue;
        const double shift = weight > 0.0 ? offset / weight : 0.0;
        merged.push_back({anchor + shift, amp});
    }
    std::stable_sort(merged.begin(), merged.end(), [](const Spike& a, const Spike& b) {
        return a.position.value() < b.position.value();
    });
    return DiscreteMeasure(std::move(merged));
}

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<Spike> s = a.spikes_;
    s.insert(s.end(), b.spikes_.begin(), b.spikes_.end());
    return DiscreteMeasure(std::move(s));
}

DiscreteMeasure operator-(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a + complex{-1.0, 0.0} * b;
}

DiscreteMeasure operator*(complex scale, const DiscreteMeasure& a) {
    std::vector<Spike> s = a.spikes_;
    for (auto& sp : s) sp.amplitude *= scale;
    return DiscreteMeasure(std::move(s));
}

DiscreteMeasure difference(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return (a - b).canonical();
}

// ---------------------------------------------------------------------------
// TrigPoly

TrigPoly::TrigPoly(int degree) : degree_(degree) {
    if (degree < 0) throw ParameterError("TrigPoly degree must be nonnegative");
    coeffs_.assign(2 * static_cast<std::size_t>(degree) + 1, complex{});
}

TrigPoly::TrigPoly(int degree, std::vector<complex> coeffs)
    : degree_(degree), coeffs_(std::move(coeffs)) {
    if (degree < 0) throw ParameterError("TrigPoly degree must be nonnegative");
    if (coeffs_.size() != 2 * static_cast<std::size_t>(degree) + 1) {
        throw ParameterError("TrigPoly of degree " + std::to_string(degree) + " needs " +
                             std::to_string(2 * degree + 1) + " coefficients, got " +
                             std::to_string(coeffs_.size()));
    }
}

complex TrigPoly::coeff(int m) const noexcept {
    if (m < -degree_ || m > degree_) return {};
    return coeffs_[static_cast<std::size_t>(m + degree_)];
}

complex& TrigPoly::coeff_ref(int m) {
    if (m < -degree_ || m > degree_) throw ParameterError("frequency outside the polynomial's window");
    return coeffs_[static_cast<std::size_t>(m + degree_)];
}

complex TrigPoly::operator()(double x) const {
    complex sum{};
    detail::for_each_phasor(degree_, x, [&](int m, complex w) { sum += coeff(m) * w; });
    return sum;
}

int TrigPoly::effective_degree(double tol) const noexcept {
    for (int m = degree_; m > 0; --m) {
        if (std::abs(coeff(m)) > tol || std::abs(coeff(-m)) > tol) return m;
    }
    return 0;
}

TrigPoly TrigPoly::resized(int degree) const {
    TrigPoly out(degree);
    const int lim = std::min(degree, degree_);
    for (int m = -lim; m <= lim; ++m) out.coeff_ref(m) = coeff(m);
    return out;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
    if (other.degree_ > degree_) *this = resized(other.degree_);
    for (int m = -other.degree_; m <= other.degree_; ++m) coeff_ref(m) += other.coeff(m);
    return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& other) {
    if (other.degree_ > degree_) *this = resized(other.degree_);
    for (int m = -other.degree_; m <= other.degree_; ++m) coeff_ref(m) -= other.coeff(m);
    return *this;
}

TrigPoly& TrigPoly::operator*=(complex scale) {
    for (auto& c : coeffs_) c *= scale;
    return *this;
}

// ---------------------------------------------------------------------------
// Operations

double min_separation(std::span<const TorusPoint> support) {
    if (support.size() < 2) return std::numeric_limits<double>::infinity();
    std::vector<double> v;
    v.reserve(support.size());
    for (auto p : support) v.push_back(p.value());
    std::sort(v.begin(), v.end());
    double best = 1.0 - (v.back() - v.front());
    for (std::size_t i = 1; i < v.size(); ++i) best = std::min(best, v[i] - v[i - 1]);
    return std::min(best, 0.5);
}

bool satisfies_separation(std::span<const TorusPoint> support, int M) {
    if (M < 1) throw ParameterError("separation check needs M >= 1");
    return min_separation(support) >= 2.0 / static_cast<double>(M);
}

double total_variation(const DiscreteMeasure& mu) noexcept {
    double tv = 0.0;
    for (const auto& s : mu.spikes()) tv += std::abs(s.amplitude);
    return tv;
}

complex fourier_coeff(const DiscreteMeasure& mu, int m) {
    complex sum{};
    for (const auto& s : mu.spikes()) {
        sum += s.amplitude * detail::unit_phasor(-static_cast<double>(m) * s.position.value());
    }
    return sum;
}

TrigPoly project(const DiscreteMeasure& mu, int M) {
    if (M < 1) throw ParameterError("projection needs M >= 1");
    TrigPoly p(M);
    auto c = p.coeffs();
    for (const auto& s : mu.spikes()) {
        detail::for_each_phasor(M, -s.position.value(), [&](int m, complex w) {
            c[static_cast<std::size_t>(m + M)] += s.amplitude * w;
        });
    }
    return p;
}

complex trig_eval(const TrigPoly& p, TorusPoint x) { return p(x.value()); }

TrigPoly trig_derivative(const TrigPoly& p, int order) {
    if (order < 0 || order > 3) throw ParameterError("derivative order must be in 0..3");
    TrigPoly out = p;
    if (order == 0) return out;
    const int M = p.degree();
    for (int m = -M; m <= M; ++m) {
        complex factor{1.0, 0.0};
        const complex d{0.0, kTwoPi * m};
        for (int k = 0; k < order; ++k) factor *= d;
        out.coeff_ref(m) *= factor;
    }
    return out;
}

double trig_l2_norm(const TrigPoly& p) noexcept {
    double s = 0.0;
    for (auto c : p.coeffs()) s += std::norm(c);
    return std::sqrt(s);
}

}  // namespace spikesolve
