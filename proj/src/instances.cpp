#include "spikesolve/instances.hpp"

#include <algorithm>
#include <cmath>

#include "spikesolve/errors.hpp"
#include "spikesolve/rng.hpp"

namespace spikesolve {

std::string to_string(AmplitudeLaw law) {
    return law == AmplitudeLaw::unit_phase ? "unit-phase" : "complex-gaussian";
}

AmplitudeLaw amplitude_law_from_string(const std::string& s) {
    if (s == "unit-phase" || s == "phase") return AmplitudeLaw::unit_phase;
    if (s == "complex-gaussian" || s == "gaussian") return AmplitudeLaw::complex_gaussian;
    throw ParameterError("unknown amplitude law '" + s + "'");
}

std::vector<TorusPoint> random_separated_support(int J, int M, double margin, std::uint64_t seed) {
    if (J < 0) throw ParameterError("J must be nonnegative");
    if (M < 1) throw ParameterError("M must be >= 1");
    if (!(margin >= 1.0)) throw ParameterError("separation margin must be >= 1");
    const double sep = margin * 2.0 / M;
    if (static_cast<double>(J) * sep > 1.0) {
        throw ParameterError("cannot place " + std::to_string(J) + " spikes " + std::to_string(sep) +
                             " apart on the torus");
    }
    CounterRng rng(seed);
    std::vector<TorusPoint> pts;
    constexpr int kAttempts = 100000;
    for (int j = 0; j < J; ++j) {
        bool placed = false;
        for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
            const TorusPoint x(rng.uniform());
            placed = std::all_of(pts.begin(), pts.end(),
                                 [&](TorusPoint p) { return torus_distance(p, x) >= sep; });
            if (placed) pts.push_back(x);
        }
        if (!placed) {
            throw ParameterError("rejection sampling could not place spike " + std::to_string(j + 1) +
                                 " of " + std::to_string(J) + " at separation " + std::to_string(sep));
        }
    }
    std::sort(pts.begin(), pts.end(), [](TorusPoint a, TorusPoint b) { return a.value() < b.value(); });
    return pts;
}

DiscreteMeasure random_separated_measure(int J, int M, double margin, std::uint64_t seed,
                                         AmplitudeLaw law) {
    const auto support = random_separated_support(J, M, margin, derive_key(seed, 0));
    CounterRng rng(derive_key(seed, 1));
    std::vector<Spike> spikes;
    for (auto s : support) {
        complex c;
        if (law == AmplitudeLaw::unit_phase) {
            c = std::polar(1.0, kTwoPi * rng.uniform());
        } else {
            // Nonzero with probability one; the 1/sqrt(2) makes E|c|^2 = 1.
            c = rng.normal_pair() / std::sqrt(2.0);
        }
        spikes.push_back({s, c});
    }
    return DiscreteMeasure(std::move(spikes));
}

std::vector<TorusPoint> support_from_gaps(double offset, const std::vector<double>& gaps, int M) {
    std::vector<TorusPoint> pts;
    double acc = 0.0;
    for (double g : gaps) {
        pts.emplace_back(offset + acc / M);
        acc += g;
    }
    return pts;
}

}  // namespace spikesolve
