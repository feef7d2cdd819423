#include "spikesolve/sampling.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "spikesolve/errors.hpp"

namespace spikesolve {

namespace {

// The FFTW planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::vector<complex> evaluate_on_grid(const TrigPoly& p, std::size_t grid_size) {
    const int M = p.degree();
    if (grid_size < 2 * static_cast<std::size_t>(M) + 1) {
        throw ParameterError("grid of " + std::to_string(grid_size) +
                             " points cannot resolve degree " + std::to_string(M));
    }
    std::vector<complex> buf(grid_size, complex{});
    const auto G = static_cast<long long>(grid_size);
    for (int m = -M; m <= M; ++m) {
        const long long idx = ((m % G) + G) % G;
        buf[static_cast<std::size_t>(idx)] += p.coeff(m);
    }
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(grid_size), data, data, FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return buf;
}

SupNorm sup_norm(const TrigPoly& p, std::size_t grid_size) {
    const int N = p.effective_degree();
    if (grid_size < min_sup_grid(N)) {
        throw ParameterError("sup_norm grid of " + std::to_string(grid_size) +
                             " points is too coarse for degree " + std::to_string(N) +
                             " (need >= " + std::to_string(min_sup_grid(N)) + ")");
    }
    const TrigPoly q = p.resized(N);
    const auto vals = evaluate_on_grid(q, grid_size);
    SupNorm out;
    out.grid_size = grid_size;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const double a = std::abs(vals[k]);
        if (a > out.grid_max) {
            out.grid_max = a;
            out.argmax = static_cast<double>(k) / static_cast<double>(grid_size);
        }
    }
    out.correction = 1.0 / (1.0 - std::numbers::pi * N / static_cast<double>(grid_size));
    out.upper_bound = out.grid_max * out.correction;
    out.certified = true;
    return out;
}

SupNorm sup_norm(const TrigPoly& p) { return sup_norm(p, min_sup_grid(p.effective_degree())); }

PolyJet poly_jet(const TrigPoly& p, double x) {
    PolyJet j{};
    detail::for_each_phasor(p.degree(), x, [&](int m, complex w) {
        const complex t = p.coeff(m) * w;
        const complex d{0.0, kTwoPi * m};
        j.value += t;
        j.d1 += d * t;
        j.d2 += d * d * t;
    });
    return j;
}

Peak refine_peak(const TrigPoly& p, double x0, double max_step, int max_steps) {
    double x = wrap_unit(x0);
    PolyJet jet = poly_jet(p, x);
    double phi = std::norm(jet.value);
    for (int it = 0; it < max_steps; ++it) {
        const double g = 2.0 * std::real(std::conj(jet.value) * jet.d1);
        const double h = 2.0 * (std::norm(jet.d1) + std::real(std::conj(jet.value) * jet.d2));
        if (g == 0.0) break;
        double step = h < 0.0 ? -g / h : std::copysign(0.25 * max_step, g);
        step = std::clamp(step, -max_step, max_step);
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            const double xn = wrap_unit(x + step);
            const PolyJet jn = poly_jet(p, xn);
            const double phin = std::norm(jn.value);
            if (phin > phi) {
                x = xn;
                jet = jn;
                phi = phin;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved || std::abs(step) < 1e-16) break;
    }
    return {x, std::sqrt(phi), 0, 0.0};
}

Peak global_peak(const TrigPoly& p, std::size_t grid_size, bool refine) {
    const auto vals = evaluate_on_grid(p, grid_size);
    const std::size_t G = vals.size();
    std::vector<double> mod(G);
    std::size_t best = 0;
    for (std::size_t k = 0; k < G; ++k) {
        mod[k] = std::abs(vals[k]);
        if (mod[k] > mod[best]) best = k;
    }
    const double h = 1.0 / static_cast<double>(G);
    Peak result{static_cast<double>(best) * h, mod[best], best, mod[best]};
    if (!refine || mod[best] == 0.0) return result;

    const int N = p.effective_degree();
    const double shrink = 1.0 - std::numbers::pi * N / static_cast<double>(G);
    const double threshold = shrink > 0.0 ? mod[best] * shrink : 0.0;

    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < G; ++k) {
        const double left = mod[(k + G - 1) % G];
        const double right = mod[(k + 1) % G];
        if (mod[k] >= threshold && mod[k] >= left && mod[k] >= right) candidates.push_back(k);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return mod[a] > mod[b]; });
    constexpr std::size_t kMaxCandidates = 32;
    if (candidates.size() > kMaxCandidates) candidates.resize(kMaxCandidates);

    for (std::size_t k : candidates) {
        Peak r = refine_peak(p, static_cast<double>(k) * h, h);
        if (r.modulus > result.modulus) {
            result.position = r.position;
            result.modulus = r.modulus;
        }
    }
    return result;
}

}  // namespace spikesolve
