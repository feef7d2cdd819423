#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spikesolve/kernels.hpp"
#include "spikesolve/noise.hpp"
#include "spikesolve/solvers.hpp"
#include "spikesolve/torus.hpp"

namespace spikesolve {

/// Closed intervals S_M(j) = { x : |x - s_j| <= 0.16 / M } around the support.
struct NeighborhoodSystem {
    std::vector<TorusPoint> centers;
    double radius = 0.0;
    int M = 0;

    /// Index of the interval containing x (nearest center on overlaps), or nothing.
    std::optional<std::size_t> classify(TorusPoint x) const;
    bool pairwise_disjoint() const;
};

NeighborhoodSystem neighborhoods(std::span<const TorusPoint> support, int M);

/// |nu| outside every S_M(j).
double far_mass(const DiscreteMeasure& nu, const NeighborhoodSystem& nbhd);

/// |nu| inside the union of the S_M(j).
double near_mass(const DiscreteMeasure& nu, const NeighborhoodSystem& nbhd);

/// sum_j of the integral over S_M(j) of |x - s_j|^2 d|nu|.
double near_second_moment(const DiscreteMeasure& nu, const NeighborhoodSystem& nbhd);

struct SmoothedError {
    double estimate = 0.0;     ///< largest |K * nu| found (grid maximum, refined for spectral K)
    double upper_bound = 0.0;  ///< sampling-corrected upper bound of the true sup
    double argmax = 0.0;
    std::size_t grid_size = 0;
    bool certified = false;
};

/// Grid used by smoothed_error: 64 max(degree of K, M), and never coarser than
/// the kernel's own sampling grid.
std::size_t smoothed_error_grid(const Kernel& K, int M);

/// sup_x |(K * nu)(x)|. Spectral kernels are sampled by FFT and carry the
/// certified Bernstein correction; spatial kernels are summed directly and
/// bounded through the Lipschitz constant |nu| sup|K'|.
SmoothedError smoothed_error(const Kernel& K, const DiscreteMeasure& nu, std::size_t grid_size);
SmoothedError smoothed_error(const Kernel& K, const DiscreteMeasure& mu, const DiscreteMeasure& mu0,
                             std::size_t grid_size);

/// |K| + |K'| / M + |K''| / M^2 with sampled sup-norms.
double kernel_factor(const Kernel& K, int M);

/// C eps (|K| + |K'| / M + |K''| / M^2).
double smoothed_error_bound(const Kernel& K, int M, double eps, double C = 1.0);

/// Second-order Taylor split of |(K * nu)(x0)| at the maximizer x0:
/// affine part over the near intervals, |K''| times the near second moment,
/// and |K| times the far mass.
struct ProofDecomposition {
    double x0 = 0.0;
    double value = 0.0;  ///< |(K * nu)(x0)|
    double affine_term = 0.0;
    double second_moment_term = 0.0;
    double far_term = 0.0;
    double total() const noexcept { return affine_term + second_moment_term + far_term; }
};

ProofDecomposition proof_decomposition(const Kernel& K, const DiscreteMeasure& nu,
                                       const NeighborhoodSystem& nbhd, std::size_t grid_size = 0);

enum class KernelFamily { fejer, dirichlet, bump };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& s);

/// Member of a family at scale N (bump width parameter L).
Kernel make_kernel(KernelFamily family, int N, double bump_L = 4.0);

enum class SolverKind { tikhonov, constrained };

struct ScalingConfig {
    int M = 128;
    std::vector<int> N_list{128, 256, 512, 1024};
    int trials = 20;
    std::uint64_t seed = 0;
    NoiseSpec noise;
    std::vector<KernelFamily> families{KernelFamily::fejer};
    double bump_L = 4.0;
    SolverKind solver = SolverKind::tikhonov;  ///< tau = eps or delta = eps
    SolverConfig solver_config;

    void validate() const;
};

struct ScalingRow {
    KernelFamily family = KernelFamily::fejer;
    int M = 0;
    int N = 0;
    int trial = 0;
    double epsilon = 0.0;
    double far_mass = 0.0;
    double near_second_moment = 0.0;
    double smoothed_sup = 0.0;
    double rhs = 0.0;    ///< smoothed_error_bound with C = 1
    double ratio = 0.0;  ///< smoothed_sup / rhs
    std::uint64_t seed = 0;
};

struct ScalingSummary {
    KernelFamily family = KernelFamily::fejer;
    int N = 0;
    double mean_over_eps = 0.0;  ///< mean of smoothed_sup / eps
    double max_over_eps = 0.0;
    double max_ratio = 0.0;      ///< max of smoothed_sup / rhs
};

struct FamilyFit {
    KernelFamily family = KernelFamily::fejer;
    bool fitted = false;  ///< false when the errors sit at solver tolerance
    double slope = 0.0;   ///< least-squares slope of log max_over_eps vs log(N/M)
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    std::vector<ScalingSummary> summary;
    std::vector<FamilyFit> fits;
    double max_ratio = 0.0;
    int failed_solves = 0;
};

/// Solves one noisy instance per trial (noise seed derived from (seed, trial))
/// and measures every kernel of every family on the same reconstruction.
ScalingResult scaling_experiment(const DiscreteMeasure& mu0, const ScalingConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spikesolve
