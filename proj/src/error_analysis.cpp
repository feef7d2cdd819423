#include "spikesolve/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikesolve/errors.hpp"
#include "spikesolve/parallel.hpp"
#include "spikesolve/rng.hpp"
#include "spikesolve/sampling.hpp"

namespace spikesolve {

std::optional<std::size_t> NeighborhoodSystem::classify(TorusPoint x) const {
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double d = torus_distance(centers[j], x);
        if (d <= radius && d < best_d) {
            best = j;
            best_d = d;
        }
    }
    return best;
}

bool NeighborhoodSystem::pairwise_disjoint() const {
    for (std::size_t j = 0; j < centers.size(); ++j) {
        for (std::size_t k = j + 1; k < centers.size(); ++k) {
            if (torus_distance(centers[j], centers[k]) <= 2.0 * radius) return false;
        }
    }
    return true;
}

NeighborhoodSystem neighborhoods(std::span<const TorusPoint> support, int M) {
    if (M < 1) throw ParameterError("neighborhoods need M >= 1");
    return {{support.begin(), support.end()}, 0.16 / static_cast<double>(M), M};
}

double far_mass(const DiscreteMeasure& nu, const NeighborhoodSystem& nbhd) {
    double s = 0.0;
    for (const auto& sp : nu.spikes()) {
        if (!nbhd.classify(sp.position)) s += std::abs(sp.amplitude);
    }
    return s;
}

double near_mass(const DiscreteMeasure& nu, const NeighborhoodSystem& nbhd) {
    double s = 0.0;
    for (const auto& sp : nu.spikes()) {
        if (nbhd.classify(sp.position)) s += std::abs(sp.amplitude);
    }
    return s;
}

double near_second_moment(const DiscreteMeasure& nu, const NeighborhoodSystem& nbhd) {
    double s = 0.0;
    for (const auto& sp : nu.spikes()) {
        if (const auto j = nbhd.classify(sp.position)) {
            const double d = torus_distance(nbhd.centers[*j], sp.position);
            s += std::abs(sp.amplitude) * d * d;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

std::size_t smoothed_error_grid(const Kernel& K, int M) {
    const int deg = K.has_spectral() ? K.spectral_form().degree() : K.nominal_scale();
    return std::max(64 * static_cast<std::size_t>(std::max({deg, M, 1})), K.default_grid());
}

SmoothedError smoothed_error(const Kernel& K, const DiscreteMeasure& nu, std::size_t grid_size) {
    SmoothedError out;
    out.grid_size = grid_size;
    if (K.has_spectral()) {
        const TrigPoly& k = K.spectral_form();
        TrigPoly p = project(nu, k.degree());
        for (int m = -k.degree(); m <= k.degree(); ++m) p.coeff_ref(m) *= k.coeff(m);
        const SupNorm s = sup_norm(p, grid_size);
        const Peak peak = global_peak(p, grid_size, true);
        out.estimate = std::max(s.grid_max, peak.modulus);
        out.upper_bound = std::max(s.upper_bound, out.estimate);
        out.argmax = peak.modulus >= s.grid_max ? peak.position : s.argmax;
        out.certified = s.certified;
        return out;
    }

    if (grid_size == 0) throw ParameterError("smoothed_error needs a positive grid size");
    const double h = 1.0 / static_cast<double>(grid_size);
    std::vector<complex> vals(grid_size);
    const double hw = K.support_halfwidth();
    const auto G = static_cast<long long>(grid_size);
    if (hw >= 0.5) {
        for (std::size_t k = 0; k < grid_size; ++k) {
            vals[k] = convolve_at(K, nu, TorusPoint(static_cast<double>(k) * h));
        }
    } else {
        // Compact support: each spike touches only the grid points within hw.
        const auto reach = static_cast<long long>(std::ceil(hw / h)) + 1;
        for (const auto& sp : nu.spikes()) {
            const auto centre = static_cast<long long>(std::llround(sp.position.value() / h));
            for (long long d = -reach; d <= reach; ++d) {
                const auto idx = static_cast<std::size_t>(((centre + d) % G + G) % G);
                const TorusPoint x(static_cast<double>(idx) * h);
                vals[idx] += sp.amplitude * K(signed_offset(sp.position, x), 0);
            }
        }
    }
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double a = std::abs(vals[k]);
        if (a > out.estimate) {
            out.estimate = a;
            out.argmax = static_cast<double>(k) * h;
        }
    }
    // |K * nu| is Lipschitz with constant |nu| sup|K'|.
    double mass = 0.0;
    for (const auto& sp : nu.spikes()) mass += std::abs(sp.amplitude);
    const double lip = K.max_order() >= 1 ? mass * sup_norm(K, 1).grid_max : 0.0;
    out.upper_bound = out.estimate + 0.5 * h * lip;
    out.certified = false;
    return out;
}

SmoothedError smoothed_error(const Kernel& K, const DiscreteMeasure& mu, const DiscreteMeasure& mu0,
                             std::size_t grid_size) {
    // The exact difference; merging nearby spikes would blur sub-tolerance dipoles.
    return smoothed_error(K, mu - mu0, grid_size);
}

double kernel_factor(const Kernel& K, int M) {
    if (M < 1) throw ParameterError("kernel_factor needs M >= 1");
    if (K.max_order() < 2) {
        throw ParameterError("kernel '" + K.name() + "' needs derivative orders 0..2");
    }
    const double Md = M;
    return sup_norm(K, 0).grid_max + sup_norm(K, 1).grid_max / Md +
           sup_norm(K, 2).grid_max / (Md * Md);
}

double smoothed_error_bound(const Kernel& K, int M, double eps, double C) {
    if (!(eps >= 0.0)) throw ParameterError("epsilon must be nonnegative");
    if (eps == 0.0) return 0.0;
    return C * eps * kernel_factor(K, M);
}

ProofDecomposition proof_decomposition(const Kernel& K, const DiscreteMeasure& nu,
                                       const NeighborhoodSystem& nbhd, std::size_t grid_size) {
    ProofDecomposition d;
    if (nu.empty()) return d;
    if (grid_size == 0) grid_size = smoothed_error_grid(K, nbhd.M);
    const SmoothedError se = smoothed_error(K, nu, grid_size);
    d.x0 = se.argmax;
    const TorusPoint x0(d.x0);
    d.value = std::abs(convolve_at(K, nu, x0));

    std::vector<complex> m0(nbhd.centers.size());
    std::vector<complex> m1(nbhd.centers.size());
    double far = 0.0;
    double near2 = 0.0;
    for (const auto& sp : nu.spikes()) {
        if (const auto j = nbhd.classify(sp.position)) {
            const double t = signed_offset(nbhd.centers[*j], sp.position);
            m0[*j] += sp.amplitude;
            m1[*j] += sp.amplitude * t;
            near2 += std::abs(sp.amplitude) * t * t;
        } else {
            far += std::abs(sp.amplitude);
        }
    }
    complex affine{};
    for (std::size_t j = 0; j < nbhd.centers.size(); ++j) {
        const double u = signed_offset(nbhd.centers[j], x0);
        affine += K(u, 0) * m0[j] - K(u, 1) * m1[j];
    }
    d.affine_term = std::abs(affine);
    d.second_moment_term = sup_norm(K, 2).upper_bound * near2;
    d.far_term = sup_norm(K, 0).upper_bound * far;
    return d;
}

// ---------------------------------------------------------------------------

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::fejer: return "fejer";
        case KernelFamily::dirichlet: return "dirichlet";
        case KernelFamily::bump: return "bump";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& s) {
    if (s == "fejer") return KernelFamily::fejer;
    if (s == "dirichlet") return KernelFamily::dirichlet;
    if (s == "bump") return KernelFamily::bump;
    throw ParameterError("unknown kernel family '" + s + "'");
}

Kernel make_kernel(KernelFamily family, int N, double bump_L) {
    switch (family) {
        case KernelFamily::fejer: return fejer_kernel(N);
        case KernelFamily::dirichlet: return dirichlet_kernel(N);
        case KernelFamily::bump: return periodized_bump(N, bump_L);
    }
    throw ParameterError("unknown kernel family");
}

void ScalingConfig::validate() const {
    if (M < 1) throw ParameterError("scaling experiment needs M >= 1");
    if (trials < 1) throw ParameterError("scaling experiment needs trials >= 1");
    if (N_list.empty()) throw ParameterError("scaling experiment needs at least one N");
    for (int N : N_list) {
        if (N < 1) throw ParameterError("kernel scale N must be >= 1");
    }
    if (families.empty()) throw ParameterError("scaling experiment needs a kernel family");
    noise.validate();
    solver_config.validate();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ParameterError("slope fit needs two or more matching points");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw ParameterError("slope fit needs distinct abscissae");
    return (n * sxy - sx * sy) / den;
}

ScalingResult scaling_experiment(const DiscreteMeasure& mu0, const ScalingConfig& cfg) {
    cfg.validate();
    const int M = cfg.M;
    const NeighborhoodSystem nbhd = neighborhoods(mu0.support(), M);

    struct Probe {
        KernelFamily family;
        int N;
        Kernel kernel;
        double factor;
        std::size_t grid;
    };
    std::vector<Probe> probes;
    for (auto family : cfg.families) {
        for (int N : cfg.N_list) {
            Kernel K = make_kernel(family, N, cfg.bump_L);
            const double factor = kernel_factor(K, M);
            const std::size_t grid = smoothed_error_grid(K, M);
            probes.push_back({family, N, std::move(K), factor, grid});
        }
    }

    const auto T = static_cast<std::size_t>(cfg.trials);
    std::vector<std::vector<ScalingRow>> per_trial(T);
    std::vector<int> failed(T, 0);
    parallel_for(T, [&](std::size_t t) {
        NoiseSpec ns = cfg.noise;
        ns.seed = derive_key(cfg.seed, t);
        const ObservationBundle bundle = make_observation(mu0, M, ns);
        const double eps = bundle.epsilon;
        SolveResult sol;
        if (eps == 0.0) {
            sol = solve_noiseless(bundle.observation, cfg.solver_config);
        } else if (cfg.solver == SolverKind::tikhonov) {
            sol = solve_tikhonov(bundle.observation, eps, cfg.solver_config);
        } else {
            sol = solve_constrained(bundle.observation, eps, cfg.solver_config);
        }
        if (!sol.converged) failed[t] = 1;
        const DiscreteMeasure nu = difference(sol.measure, mu0);
        const double far = far_mass(nu, nbhd);
        const double near2 = near_second_moment(nu, nbhd);
        const DiscreteMeasure raw = sol.measure - mu0;
        for (const auto& p : probes) {
            ScalingRow row;
            row.family = p.family;
            row.M = M;
            row.N = p.N;
            row.trial = static_cast<int>(t);
            row.epsilon = eps;
            row.far_mass = far;
            row.near_second_moment = near2;
            row.smoothed_sup = smoothed_error(p.kernel, raw, p.grid).estimate;
            row.rhs = eps * p.factor;
            row.ratio = row.rhs > 0.0 ? row.smoothed_sup / row.rhs : 0.0;
            row.seed = ns.seed;
            per_trial[t].push_back(row);
        }
    });

    ScalingResult out;
    for (int f : failed) out.failed_solves += f;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        ScalingSummary s;
        s.family = probes[p].family;
        s.N = probes[p].N;
        double sum = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const ScalingRow& row = per_trial[t][p];
            out.rows.push_back(row);
            const double over = row.epsilon > 0.0 ? row.smoothed_sup / row.epsilon : 0.0;
            sum += over;
            s.max_over_eps = std::max(s.max_over_eps, over);
            s.max_ratio = std::max(s.max_ratio, row.ratio);
        }
        s.mean_over_eps = sum / static_cast<double>(T);
        out.max_ratio = std::max(out.max_ratio, s.max_ratio);
        out.summary.push_back(s);
    }

    for (auto family : cfg.families) {
        FamilyFit fit;
        fit.family = family;
        std::vector<double> xs, ys;
        bool usable = true;
        for (const auto& s : out.summary) {
            if (s.family != family) continue;
            xs.push_back(static_cast<double>(s.N) / M);
            ys.push_back(s.max_over_eps);
            if (!(s.max_over_eps > 0.0)) usable = false;
        }
        if (usable && xs.size() >= 2) {
            fit.fitted = true;
            fit.slope = loglog_slope(xs, ys);
        }
        out.fits.push_back(fit);
    }
    return out;
}

}  // namespace spikesolve
