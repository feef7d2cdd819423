#pragma once

#include <cstddef>
#include <vector>

#include "spikesolve/torus.hpp"

namespace spikesolve {

/// Values p(k/G) for k = 0..G-1, via one inverse FFT. Requires G >= 2*degree + 1.
std::vector<complex> evaluate_on_grid(const TrigPoly& p, std::size_t grid_size);

/// Result of a sampled sup-norm.
///
/// For a degree-N polynomial sampled on G points the true sup lies in
/// [grid_max, grid_max / (1 - pi N / G)]; `upper_bound` carries the right end.
struct SupNorm {
    double grid_max = 0.0;
    double upper_bound = 0.0;
    double correction = 1.0;  ///< upper_bound / grid_max
    double argmax = 0.0;      ///< grid point attaining grid_max (lowest index on ties)
    std::size_t grid_size = 0;
    bool certified = false;   ///< true when upper_bound is a proven bound
};

/// Smallest admissible grid for sup_norm on a polynomial of the given degree.
inline std::size_t min_sup_grid(int degree) {
    return 64 * static_cast<std::size_t>(degree > 0 ? degree : 1);
}

/// Sampled sup-norm with the Bernstein correction; throws ParameterError if
/// grid_size < 64 * effective degree.
SupNorm sup_norm(const TrigPoly& p, std::size_t grid_size);
SupNorm sup_norm(const TrigPoly& p);

/// p, p', p'' at one point.
struct PolyJet {
    complex value, d1, d2;
};
PolyJet poly_jet(const TrigPoly& p, double x);

struct Peak {
    double position = 0.0;
    double modulus = 0.0;
    std::size_t grid_index = 0;
    double grid_modulus = 0.0;
};

/// Local maximization of |p| starting at x0 with damped Newton steps on |p|^2.
/// Steps are capped at `max_step`; at most `max_steps` iterations.
Peak refine_peak(const TrigPoly& p, double x0, double max_step, int max_steps = 20);

/// Global maximizer of |p| over the torus: grid scan on G points, then
/// refinement of every grid local maximum that could still hold the global
/// maximum according to the sampling bound. With refine = false the best grid
/// point is returned (lowest index on ties).
Peak global_peak(const TrigPoly& p, std::size_t grid_size, bool refine = true);

}  // namespace spikesolve
