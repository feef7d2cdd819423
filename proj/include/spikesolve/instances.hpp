#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikesolve/torus.hpp"

namespace spikesolve {

enum class AmplitudeLaw { unit_phase, complex_gaussian };

std::string to_string(AmplitudeLaw law);
AmplitudeLaw amplitude_law_from_string(const std::string& s);

/// J points with pairwise torus distance >= margin * 2 / M by sequential
/// rejection sampling, sorted. Throws ParameterError when J * margin * 2 / M > 1
/// or when sampling fails to place a point.
std::vector<TorusPoint> random_separated_support(int J, int M, double margin, std::uint64_t seed);

/// Support from random_separated_support with amplitudes drawn from `law`.
DiscreteMeasure random_separated_measure(int J, int M, double margin, std::uint64_t seed,
                                         AmplitudeLaw law = AmplitudeLaw::unit_phase);

/// Points offset + (g_0 + ... + g_{k-1}) / M for k = 0..J-1, where the gaps g are
/// given in units of 1/M. The same gaps give the same geometry at every M.
std::vector<TorusPoint> support_from_gaps(double offset, const std::vector<double>& gaps, int M);

}  // namespace spikesolve
