#include "spikesolve/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spikesolve/errors.hpp"
#include "spikesolve/sampling.hpp"

namespace spikesolve {

void SolverConfig::validate() const {
    if (grid_factor < 4) throw ParameterError("grid_factor must be >= 4");
    if (max_iterations < 1) throw ParameterError("max_iterations must be >= 1");
    if (!(gap_tolerance > 0.0)) throw ParameterError("gap_tolerance must be > 0");
    if (!(merge_tolerance > 0.0)) throw ParameterError("merge_tolerance must be > 0");
}

namespace {

using Eigen::Index;

struct Atoms {
    std::vector<double> x;
    std::vector<complex> c;
    std::size_t size() const noexcept { return x.size(); }
};

Atoms atoms_from(const DiscreteMeasure& mu) {
    Atoms a;
    for (const auto& s : mu.spikes()) {
        if (s.amplitude == complex{}) continue;
        a.x.push_back(s.position.value());
        a.c.push_back(s.amplitude);
    }
    return a;
}

DiscreteMeasure measure_from(const Atoms& a) {
    std::vector<Spike> spikes;
    spikes.reserve(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) spikes.push_back({TorusPoint(a.x[j]), a.c[j]});
    return DiscreteMeasure(std::move(spikes)).canonical();
}

std::size_t grid_points(int M, int factor) {
    return static_cast<std::size_t>(factor) * (2 * static_cast<std::size_t>(M) + 1);
}

/// r = P_M(atoms) - y.
std::vector<complex> residual(const Atoms& a, const TrigPoly& y) {
    const int M = y.degree();
    std::vector<complex> r(y.coeffs().begin(), y.coeffs().end());
    for (auto& v : r) v = -v;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const complex cj = a.c[j];
        detail::for_each_phasor(M, -a.x[j], [&](int m, complex w) {
            r[static_cast<std::size_t>(m + M)] += cj * w;
        });
    }
    return r;
}

double squared_norm(const std::vector<complex>& r) {
    double s = 0.0;
    for (auto v : r) s += std::norm(v);
    return s;
}

double total_variation(const Atoms& a) {
    double s = 0.0;
    for (auto v : a.c) s += std::abs(v);
    return s;
}

double objective(const std::vector<complex>& r, const Atoms& a, double tau) {
    return 0.5 * squared_norm(r) + tau * total_variation(a);
}

/// Dual prepolynomial y - P_M(mu) as a trigonometric polynomial.
TrigPoly correlation(const std::vector<complex>& r, int M) {
    TrigPoly q(M);
    auto c = q.coeffs();
    for (std::size_t i = 0; i < r.size(); ++i) c[i] = -r[i];
    return q;
}

/// Primal minus dual objective, the dual point being -r scaled into
/// { p : sup |p(x)| <= tau } given sup |p(x)| = `sup`.
double gap_from(double primal, const std::vector<complex>& r, const TrigPoly& y, double tau,
                double sup) {
    const double s = sup > tau ? tau / sup : 1.0;
    double ry = 0.0;
    const auto yc = y.coeffs();
    for (std::size_t i = 0; i < r.size(); ++i) ry += std::real(std::conj(r[i]) * yc[i]);
    const double dual = -s * ry - 0.5 * s * s * squared_norm(r);
    return primal - dual;
}

Eigen::VectorXcd real_times(const Eigen::MatrixXd& H, const Eigen::VectorXcd& c) {
    Eigen::VectorXcd out(c.size());
    out.real() = H * c.real();
    out.imag() = H * c.imag();
    return out;
}

// --- fully-corrective amplitude step -------------------------------------------
//
// For fixed positions the problem is min_c 1/2 c^H H c - Re(b^H c) + tau sum |c_j|
// with H_jk = D_M(x_j - x_k) (real, symmetric) and b_j = y(x_j).

struct AmplitudeProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXcd b;
    double tau = 0.0;

    double value(const Eigen::VectorXcd& c) const {
        const Eigen::VectorXcd Hc = real_times(H, c);
        return 0.5 * c.dot(Hc).real() - b.dot(c).real() + tau * c.cwiseAbs().sum();
    }

    Eigen::VectorXcd smooth_gradient(const Eigen::VectorXcd& c) const { return real_times(H, c) - b; }

    double kkt(const Eigen::VectorXcd& c) const {
        const Eigen::VectorXcd g = smooth_gradient(c);
        double worst = 0.0;
        for (Index j = 0; j < c.size(); ++j) {
            const double a = std::abs(c(j));
            const double v = a > 0.0 ? std::abs(g(j) + tau * c(j) / a)
                                     : std::max(0.0, std::abs(g(j)) - tau);
            worst = std::max(worst, v);
        }
        return worst;
    }

    double scale() const {
        return std::max(tau, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
    }
};

AmplitudeProblem amplitude_problem(const Atoms& a, const TrigPoly& y, double tau) {
    const auto K = static_cast<Index>(a.size());
    AmplitudeProblem p;
    p.tau = tau;
    const int M = y.degree();
    const Index R = 2 * M + 1;
    // H_jk = D_M(x_j - x_k) = Re(e_j^H e_k) with e_j the phasors of atom j.
    Eigen::MatrixXd E(2 * R, K);
    p.b.resize(K);
    for (Index j = 0; j < K; ++j) {
        const double x = a.x[static_cast<std::size_t>(j)];
        p.b(j) = y(x);
        detail::for_each_phasor(M, -x, [&](int m, complex w) {
            E(m + M, j) = w.real();
            E(R + m + M, j) = w.imag();
        });
    }
    p.H = Eigen::MatrixXd::Zero(K, K);
    p.H.selfadjointView<Eigen::Lower>().rankUpdate(E.transpose());
    p.H.triangularView<Eigen::StrictlyUpper>() = p.H.transpose();
    return p;
}

void coordinate_descent(const AmplitudeProblem& p, Eigen::VectorXcd& c, int max_sweeps) {
    Eigen::VectorXcd grad = p.smooth_gradient(c);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Index j = 0; j < c.size(); ++j) {
            const double hjj = p.H(j, j);
            const complex z = c(j) - grad(j) / hjj;
            const double nz = std::abs(z);
            const double thr = p.tau / hjj;
            const complex cn = nz > thr ? z * (1.0 - thr / nz) : complex{};
            const complex d = cn - c(j);
            if (d != complex{}) {
                grad += p.H.col(j).cast<complex>() * d;
                c(j) = cn;
                max_delta = std::max(max_delta, std::abs(d));
            }
        }
        const double size = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
        if (max_delta <= 1e-14 * size || max_delta == 0.0) break;
    }
}

/// Newton iterations on the nonzero coordinates, where the objective is smooth.
void newton_polish(const AmplitudeProblem& p, Eigen::VectorXcd& c) {
    const double tau = p.tau;
    for (int it = 0; it < 50; ++it) {
        std::vector<Index> S;
        for (Index j = 0; j < c.size(); ++j) {
            if (c(j) != complex{}) S.push_back(j);
        }
        const auto n = static_cast<Index>(S.size());
        if (n == 0) return;

        const Eigen::VectorXcd grad = p.smooth_gradient(c);
        Eigen::VectorXd g(2 * n);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for (Index a = 0; a < n; ++a) {
            for (Index b = 0; b < n; ++b) {
                hess(a, b) = p.H(S[static_cast<std::size_t>(a)], S[static_cast<std::size_t>(b)]);
                hess(n + a, n + b) = hess(a, b);
            }
        }
        for (Index a = 0; a < n; ++a) {
            const complex cj = c(S[static_cast<std::size_t>(a)]);
            const double mod = std::abs(cj);
            const double u = cj.real() / mod;
            const double v = cj.imag() / mod;
            g(a) = grad(S[static_cast<std::size_t>(a)]).real() + tau * u;
            g(n + a) = grad(S[static_cast<std::size_t>(a)]).imag() + tau * v;
            const double k = tau / mod;
            hess(a, a) += k * (1.0 - u * u);
            hess(n + a, n + a) += k * (1.0 - v * v);
            hess(a, n + a) -= k * u * v;
            hess(n + a, a) -= k * u * v;
        }
        const double gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm <= 1e-15 * std::max(p.scale(), 1e-300)) return;

        const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() != Eigen::Success) return;
        const Eigen::VectorXd step = -ldlt.solve(g);
        if (!step.allFinite()) return;

        const double f0 = p.value(c);
        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXcd trial = c;
        for (int ls = 0; ls < 40; ++ls) {
            trial = c;
            for (Index a = 0; a < n; ++a) {
                trial(S[static_cast<std::size_t>(a)]) += complex{t * step(a), t * step(n + a)};
            }
            const double f1 = p.value(trial);
            // Near the optimum the objective change drops below rounding; accept
            // steps that keep the value and reduce the optimality residual.
            if (f1 < f0 || (f1 <= f0 + 1e-14 * std::abs(f0) && p.kkt(trial) < 0.5 * gnorm)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) return;
        c = trial;
        if (t * step.cwiseAbs().maxCoeff() <= 1e-16 * std::max(1.0, c.cwiseAbs().maxCoeff())) return;
    }
}

void solve_amplitudes(const AmplitudeProblem& p, Eigen::VectorXcd& c) {
    const double scale = p.scale();
    if (scale == 0.0) {
        c.setZero();
        return;
    }
    for (int round = 0; round < 30; ++round) {
        coordinate_descent(p, c, 2000);
        newton_polish(p, c);
        if (p.kkt(c) <= 1e-12 * scale) break;
    }
}

void prune_zeros(Atoms& a) {
    Atoms out;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a.c[j] != complex{}) {
            out.x.push_back(a.x[j]);
            out.c.push_back(a.c[j]);
        }
    }
    a = std::move(out);
}

void update_amplitudes(Atoms& a, const TrigPoly& y, double tau) {
    if (a.size() == 0) return;
    const auto p = amplitude_problem(a, y, tau);
    Eigen::VectorXcd c(static_cast<Index>(a.size()));
    for (std::size_t j = 0; j < a.size(); ++j) c(static_cast<Index>(j)) = a.c[j];
    solve_amplitudes(p, c);
    for (std::size_t j = 0; j < a.size(); ++j) a.c[j] = c(static_cast<Index>(j));
    prune_zeros(a);
}

// --- joint position/amplitude descent ------------------------------------------

/// Levenberg-Marquardt on F(x, c) = 1/2 |P_M(sum c_j delta_{x_j}) - y|^2 + tau sum |c_j|
/// over all positions and amplitudes (atoms must have nonzero amplitude).
/// Accepts only strict decreases of F.
void slide(Atoms& atoms, const TrigPoly& y, double tau, int max_iterations) {
    const int M = y.degree();
    const auto K = static_cast<Index>(atoms.size());
    if (K == 0) return;
    const Index R = 2 * M + 1;
    const Index P = 3 * K;
    const double max_dx = 0.25 / static_cast<double>(R);

    Eigen::VectorXcd omega(R);
    for (int m = -M; m <= M; ++m) omega(m + M) = complex{0.0, -kTwoPi * m};

    std::vector<complex> r = residual(atoms, y);
    double F = objective(r, atoms, tau);
    double lambda = 1e-6;

    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::Map<const Eigen::VectorXcd> rv(r.data(), R);
        // Re(a^H b) = [Re a; Im a]^T [Re b; Im b], so the real Gauss-Newton
        // blocks come from one real product.
        Eigen::MatrixXd Jr(2 * R, P);
        const auto put = [&](Index col, const Eigen::VectorXcd& v) {
            Jr.col(col).head(R) = v.real();
            Jr.col(col).tail(R) = v.imag();
        };
        Eigen::VectorXd rr(2 * R);
        rr.head(R) = rv.real();
        rr.tail(R) = rv.imag();
        Eigen::MatrixXd Hres = Eigen::MatrixXd::Zero(P, P);
        for (Index j = 0; j < K; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            Eigen::VectorXcd e(R);
            detail::for_each_phasor(M, -atoms.x[sj], [&](int m, complex w) { e(m + M) = w; });
            const Eigen::VectorXcd we = omega.cwiseProduct(e);
            put(j, atoms.c[sj] * we);
            put(K + j, e);
            put(2 * K + j, complex{0.0, 1.0} * e);
            Hres(j, j) = rv.dot(atoms.c[sj] * omega.cwiseProduct(we)).real();
            const double xu = rv.dot(we).real();
            const double xv = rv.dot(complex{0.0, 1.0} * we).real();
            Hres(j, K + j) = Hres(K + j, j) = xu;
            Hres(j, 2 * K + j) = Hres(2 * K + j, j) = xv;
        }
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(P, P);
        H.selfadjointView<Eigen::Lower>().rankUpdate(Jr.transpose());
        H.triangularView<Eigen::StrictlyUpper>() = H.transpose();
        H += Hres;
        Eigen::VectorXd g = Jr.transpose() * rr;
        for (Index j = 0; j < K; ++j) {
            const complex cj = atoms.c[static_cast<std::size_t>(j)];
            const double mod = std::abs(cj);
            const double u = cj.real() / mod;
            const double v = cj.imag() / mod;
            const double k = tau / mod;
            g(K + j) += tau * u;
            g(2 * K + j) += tau * v;
            H(K + j, K + j) += k * (1.0 - u * u);
            H(2 * K + j, 2 * K + j) += k * (1.0 - v * v);
            H(K + j, 2 * K + j) -= k * u * v;
            H(2 * K + j, K + j) -= k * u * v;
        }
        if (!g.allFinite() || g.cwiseAbs().maxCoeff() == 0.0) return;

        const Eigen::VectorXd diag = H.diagonal().cwiseAbs().cwiseMax(1e-300);
        bool accepted = false;
        Atoms trial;
        std::vector<complex> trial_r;
        double F1 = F;
        for (int attempt = 0; attempt < 25; ++attempt) {
            Eigen::MatrixXd A = H;
            A.diagonal() += lambda * diag;
            const Eigen::LLT<Eigen::MatrixXd> llt(A);
            if (llt.info() != Eigen::Success) {
                lambda *= 10.0;
                continue;
            }
            Eigen::VectorXd step = -llt.solve(g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const double dx = step.head(K).cwiseAbs().maxCoeff();
            if (dx > max_dx) step *= max_dx / dx;
            trial = atoms;
            for (Index j = 0; j < K; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                trial.x[sj] = wrap_unit(atoms.x[sj] + step(j));
                trial.c[sj] += complex{step(K + j), step(2 * K + j)};
            }
            trial_r = residual(trial, y);
            F1 = objective(trial_r, trial, tau);
            if (F1 < F) {
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) return;
        const double decrease = F - F1;
        atoms = std::move(trial);
        r = std::move(trial_r);
        F = F1;
        lambda = std::max(lambda / 10.0, 1e-12);
        for (auto c : atoms.c) {
            if (c == complex{}) return;
        }
        if (decrease <= 1e-15 * F) return;
    }
}

/// Combines atoms closer than `tol`; returns true when something merged.
bool merge_close(Atoms& a, double tol) {
    if (a.size() < 2) return false;
    std::vector<std::size_t> order(a.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a.x[i] < a.x[j]; });
    Atoms sorted;
    for (auto i : order) {
        sorted.x.push_back(a.x[i]);
        sorted.c.push_back(a.c[i]);
    }
    std::vector<Spike> spikes;
    for (std::size_t j = 0; j < sorted.size(); ++j) spikes.push_back({TorusPoint(sorted.x[j]), sorted.c[j]});
    const DiscreteMeasure merged = DiscreteMeasure(std::move(spikes)).canonical(tol);
    if (merged.size() == sorted.size()) return false;
    a = atoms_from(merged);
    return true;
}

/// Gap accepted once the iteration stalls: the rounding level of the gap itself,
/// which is computed from quantities of size |y|^2.
double gap_floor(const SolverConfig& cfg, double primal, double y_sq) {
    return std::max(cfg.gap_tolerance * primal, kGapRoundingFloor * y_sq);
}

/// Batch insertions keep this many cells of width 1/(2M+1) away from existing atoms.
constexpr double kBatchExclusion = 0.5;

struct TikhonovState {
    Atoms atoms;
    std::vector<complex> r;
    double F = 0.0;
};

TikhonovState make_state(Atoms atoms, const TrigPoly& y, double tau) {
    TikhonovState s;
    s.atoms = std::move(atoms);
    s.r = residual(s.atoms, y);
    s.F = objective(s.r, s.atoms, tau);
    return s;
}

SolveResult finish(const TikhonovState& s, const TrigPoly& y, double tau, double gap,
                   std::vector<double> trace, int iterations, bool converged, std::string status) {
    SolveResult out;
    out.measure = measure_from(s.atoms);
    out.residual_l2 = std::sqrt(squared_norm(s.r));
    out.duality_gap = gap;
    out.objective = s.F;
    out.tau = tau;
    out.iterations = iterations;
    out.objective_trace = std::move(trace);
    out.converged = converged;
    out.status = std::move(status);
    (void)y;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

SolveResult solve_tikhonov(const Observation& obs, double tau, const SolverConfig& cfg,
                           const DiscreteMeasure* warm_start) {
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    cfg.validate();
    const TrigPoly& y = obs.y;
    const int M = y.degree();
    const std::size_t G = grid_points(M, cfg.grid_factor);
    const double h = 1.0 / static_cast<double>(G);
    const double y_sq = trig_l2_norm(y) * trig_l2_norm(y);

    const auto polish = [&](Atoms& a) {
        update_amplitudes(a, y, tau);
        if (cfg.refine_positions && !cfg.restrict_to_grid) {
            slide(a, y, tau, 30);
            prune_zeros(a);
            update_amplitudes(a, y, tau);
        }
    };

    Atoms init;
    if (warm_start) {
        init = atoms_from(*warm_start);
        if (cfg.restrict_to_grid) {
            for (auto& x : init.x) x = wrap_unit(std::round(x / h) * h);
            merge_close(init, 0.5 * h);
        } else {
            merge_close(init, cfg.merge_tolerance);
        }
        polish(init);
    }
    TikhonovState state = make_state(std::move(init), y, tau);
    std::vector<double> trace{state.F};

    int stalls = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iterations; ++it) {
        const TrigPoly q = correlation(state.r, M);
        const Peak peak = global_peak(q, G, !cfg.restrict_to_grid);
        gap = gap_from(state.F, state.r, y, tau, peak.modulus);
        if (gap <= cfg.gap_tolerance * state.F || state.F == 0.0) {
            return finish(state, y, tau, gap, std::move(trace), it, true, "converged");
        }

        // Insert the global peak and every other grid local maximum of |q| above both tau
        // and half the peak, away from current atoms. The peak condition keeps sidelobes
        // of large atoms out; violations next to an atom are left to sliding.
        const bool refine = cfg.refine_positions && !cfg.restrict_to_grid;
        std::vector<double> fresh{refine ? peak.position : static_cast<double>(peak.grid_index) * h};
        const auto qv = evaluate_on_grid(q, G);
        for (std::size_t k = 0; k < G; ++k) {
            const double v = std::abs(qv[k]);
            if (k == peak.grid_index || v <= std::max(tau, 0.5 * peak.modulus)) continue;
            const double prev = std::abs(qv[(k + G - 1) % G]);
            const double nxt = std::abs(qv[(k + 1) % G]);
            if (v < prev || v <= nxt) continue;
            const double x0 = static_cast<double>(k) * h;
            bool near_atom = false;
            for (auto x : state.atoms.x) {
                if (torus_distance(TorusPoint(x), TorusPoint(x0)) < kBatchExclusion / (2.0 * M + 1.0)) near_atom = true;
            }
            if (!near_atom) fresh.push_back(refine ? refine_peak(q, x0, h).position : x0);
        }
        Atoms next = state.atoms;
        const double dup_tol = cfg.restrict_to_grid ? 0.5 * h : cfg.merge_tolerance;
        for (double x_new : fresh) {
            bool duplicate = false;
            for (auto x : next.x) {
                if (torus_distance(TorusPoint(x), TorusPoint(x_new)) <= dup_tol) duplicate = true;
            }
            if (!duplicate) {
                next.x.push_back(x_new);
                next.c.push_back(complex{});
            }
        }
        polish(next);
        TikhonovState candidate = make_state(std::move(next), y, tau);
        if (!cfg.restrict_to_grid) {
            Atoms merged = candidate.atoms;
            if (merge_close(merged, cfg.merge_tolerance)) {
                polish(merged);
                TikhonovState m = make_state(std::move(merged), y, tau);
                if (m.F <= candidate.F) candidate = std::move(m);
            }
        }
        if (candidate.F < state.F) {
            state = std::move(candidate);
            stalls = 0;
        } else if (++stalls >= 3) {
            // No further decrease is representable; accept if the gap is at rounding level.
            trace.push_back(state.F);
            const bool ok = gap <= gap_floor(cfg, state.F, y_sq);
            return finish(state, y, tau, gap, std::move(trace), it + 1, ok,
                          ok ? "converged at rounding floor" : "stalled");
        }
        trace.push_back(state.F);
    }
    const TrigPoly q = correlation(state.r, M);
    gap = gap_from(state.F, state.r, y, tau, global_peak(q, G, !cfg.restrict_to_grid).modulus);
    const bool ok = gap <= cfg.gap_tolerance * state.F || state.F == 0.0;
    return finish(state, y, tau, gap, std::move(trace), cfg.max_iterations, ok,
                  ok ? "converged" : "max_iterations");
}

SolveResult solve_constrained(const Observation& obs, double delta, const SolverConfig& cfg) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    cfg.validate();
    const TrigPoly& y = obs.y;
    const int M = y.degree();
    const double ynorm = trig_l2_norm(y);

    if (delta >= ynorm) {
        SolveResult zero;
        zero.residual_l2 = ynorm;
        zero.objective_trace = {0.0};
        zero.converged = true;
        zero.status = "zero measure feasible";
        return zero;
    }
    constexpr double kRelTol = 1e-3;

    const double tau_max = global_peak(y, grid_points(M, cfg.grid_factor), true).modulus;
    SolveResult hi;
    hi.tau = tau_max;
    hi.residual_l2 = ynorm;
    hi.converged = true;

    int solves = 0;
    SolveResult lo;
    bool have_lo = false;
    double tau = 0.5 * tau_max;
    DiscreteMeasure warm;
    while (solves < 60) {
        SolveResult s = solve_tikhonov(obs, tau, cfg, &warm);
        ++solves;
        if (s.residual_l2 <= delta) {
            lo = std::move(s);
            have_lo = true;
            break;
        }
        warm = s.measure;
        const double ratio = delta / s.residual_l2;
        hi = std::move(s);
        tau *= std::clamp(0.5 * ratio, 1e-6, 0.5);
    }
    if (!have_lo) {
        hi.converged = false;
        hi.status = "bracketing failed: no tau reached residual <= delta";
        hi.path_solves = solves;
        return hi;
    }

    SolveResult best = lo;
    bool bracketed = lo.residual_l2 >= (1.0 - kRelTol) * delta;
    int same_side = 0;
    int last_side = 0;
    while (!bracketed && solves < 100) {
        const double a = std::log(lo.tau);
        const double b = std::log(hi.tau);
        double t = 0.5 * (a + b);
        if (lo.residual_l2 > 0.0 && same_side < 2) {
            // Regula falsi on log(residual) against log(tau), kept inside the bracket.
            const double fa = std::log(lo.residual_l2 / delta);
            const double fb = std::log(hi.residual_l2 / delta);
            t = a - fa * (b - a) / (fb - fa);
            t = std::clamp(t, a + 0.02 * (b - a), b - 0.02 * (b - a));
        }
        if (!(b - a > 1e-12)) break;
        SolveResult s = solve_tikhonov(obs, std::exp(t), cfg, &lo.measure);
        ++solves;
        const int side = s.residual_l2 <= delta ? -1 : 1;
        same_side = side == last_side ? same_side + 1 : 1;
        last_side = side;
        if (side < 0) {
            lo = std::move(s);
            if (total_variation(lo.measure) <= total_variation(best.measure)) best = lo;
            bracketed = lo.residual_l2 >= (1.0 - kRelTol) * delta;
        } else {
            hi = std::move(s);
        }
    }
    best.path_solves = solves;
    if (!bracketed) {
        best.converged = false;
        best.status = "residual not within tolerance of delta";
    } else if (best.converged) {
        best.status = "converged";
    }
    return best;
}

double noiseless_delta(const Observation& obs) {
    return std::max(1e-8, 1e-10 * trig_l2_norm(obs.y));
}

SolveResult solve_noiseless(const Observation& obs, const SolverConfig& cfg) {
    return solve_constrained(obs, noiseless_delta(obs), cfg);
}

double tikhonov_objective(const Observation& obs, double tau, const DiscreteMeasure& mu) {
    const TrigPoly r = project(mu, obs.degree()) - obs.y;
    const double n = trig_l2_norm(r);
    return 0.5 * n * n + tau * spikesolve::total_variation(mu);
}

double duality_gap(const Observation& obs, double tau, const DiscreteMeasure& mu, int grid_factor) {
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    const Atoms a = atoms_from(mu);
    const auto r = residual(a, obs.y);
    const double F = objective(r, a, tau);
    const int M = obs.degree();
    const double sup = global_peak(correlation(r, M), grid_points(M, grid_factor), true).modulus;
    return gap_from(F, r, obs.y, tau, sup);
}

GridLassoResult grid_lasso_oracle(const Observation& obs, double tau, std::size_t grid_size) {
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    const int M = obs.degree();
    const auto R = static_cast<Index>(2 * M + 1);
    if (grid_size < 4 * static_cast<std::size_t>(R)) {
        throw ParameterError("grid_lasso_oracle needs grid_size >= 4 (2M + 1)");
    }
    const auto G = static_cast<Index>(grid_size);

    // A(m, g) = exp(-2 pi i m g / G); A A^H = G I, so the gradient step is 1/G.
    Eigen::MatrixXcd A(R, G);
    for (Index g = 0; g < G; ++g) {
        for (int m = -M; m <= M; ++m) {
            const double phase = -kTwoPi * static_cast<double>((static_cast<long long>(m) * g) % G) /
                                 static_cast<double>(G);
            A(m + M, g) = std::polar(1.0, phase);
        }
    }
    Eigen::VectorXcd y(R);
    for (int m = -M; m <= M; ++m) y(m + M) = obs.y.coeff(m);
    const double L = static_cast<double>(G);
    const double ysq = y.squaredNorm();

    auto prox = [&](const Eigen::VectorXcd& z, double thr) {
        Eigen::VectorXcd out(z.size());
        for (Index i = 0; i < z.size(); ++i) {
            const double a = std::abs(z(i));
            out(i) = a > thr ? z(i) * (1.0 - thr / a) : complex{};
        }
        return out;
    };
    auto primal_dual_gap = [&](const Eigen::VectorXcd& c, double& primal) {
        const Eigen::VectorXcd r = A * c - y;
        primal = 0.5 * r.squaredNorm() + tau * c.cwiseAbs().sum();
        const double sup = (A.adjoint() * r).cwiseAbs().maxCoeff();
        const double s = sup > tau ? tau / sup : 1.0;
        const double dual = -s * r.dot(y).real() - 0.5 * s * s * r.squaredNorm();
        return primal - dual;
    };

    GridLassoResult out;
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(G);
    Eigen::VectorXcd z = c;
    double t = 1.0;
    double primal = 0.5 * ysq;
    double gap = primal_dual_gap(c, primal);
    constexpr int kMaxIterations = 400000;
    int it = 0;
    for (; it < kMaxIterations; ++it) {
        if (gap <= 1e-10 * primal || ysq == 0.0) break;
        const Eigen::VectorXcd grad = A.adjoint() * (A * z - y);
        const Eigen::VectorXcd cn = prox(z - grad / L, tau / L);
        if ((z - cn).dot(cn - c).real() > 0.0) {
            // Momentum points uphill: restart.
            t = 1.0;
            z = cn;
        } else {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            z = cn + ((t - 1.0) / tn) * (cn - c);
            t = tn;
        }
        c = cn;
        if (it % 10 == 9) gap = primal_dual_gap(c, primal);
    }
    gap = primal_dual_gap(c, primal);
    out.iterations = it;
    out.objective = primal;
    out.duality_gap = gap;
    out.converged = gap <= 1e-10 * primal || ysq == 0.0;
    std::vector<Spike> spikes;
    for (Index g = 0; g < G; ++g) {
        if (c(g) != complex{}) {
            spikes.push_back({TorusPoint(static_cast<double>(g) / L), c(g)});
        }
    }
    out.measure = DiscreteMeasure(std::move(spikes));
    return out;
}

ApproximationReport is_approximation(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, int M,
                                     double epsilon) {
    ApproximationReport r;
    r.total_variation = spikesolve::total_variation(mu);
    r.reference_total_variation = spikesolve::total_variation(mu0);
    const TrigPoly d = project(mu, M) - project(mu0, M);
    r.l2_distance = trig_l2_norm(d);
    r.linf_distance = global_peak(d, grid_points(M, 16), true).modulus;
    r.tv_ok = r.total_variation <= r.reference_total_variation + 2.0 * epsilon;
    r.l2_ok = r.l2_distance <= 2.0 * epsilon;
    return r;
}

MatchReport match_measures(const DiscreteMeasure& recovered, const DiscreteMeasure& truth,
                           double capture_radius) {
    MatchReport r;
    const auto rec = recovered.canonical();
    r.recovered = rec.size();
    std::vector<bool> used(rec.size(), false);
    for (const auto& t : truth.spikes()) {
        complex mass{};
        double weight = 0.0;
        double offset = 0.0;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const auto& s = rec.spikes()[i];
            if (torus_distance(s.position, t.position) <= capture_radius) {
                used[i] = true;
                mass += s.amplitude;
                weight += std::abs(s.amplitude);
                offset += std::abs(s.amplitude) * signed_offset(t.position, s.position);
            }
        }
        const double pos_err = weight > 0.0 ? std::abs(offset / weight) : 1.0;
        r.max_position_error = std::max(r.max_position_error, pos_err);
        r.max_amplitude_error =
            std::max(r.max_amplitude_error, std::abs(mass - t.amplitude) / std::abs(t.amplitude));
    }
    for (std::size_t i = 0; i < rec.size(); ++i) {
        if (!used[i]) r.unmatched_mass += std::abs(rec.spikes()[i].amplitude);
    }
    return r;
}

}  // namespace spikesolve
