#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spikesolve/certificate.hpp"
#include "spikesolve/error_analysis.hpp"
#include "spikesolve/noise.hpp"
#include "spikesolve/solvers.hpp"
#include "spikesolve/torus.hpp"

namespace spikesolve {

using json = nlohmann::json;

json to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const json& j);

json to_json(const TrigPoly& p);
TrigPoly trigpoly_from_json(const json& j);

json to_json(const NoiseSpec& spec);
NoiseSpec noise_spec_from_json(const json& j);

json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const json& j);

json to_json(const SolveResult& r);
json to_json(const ApproximationReport& r);
json to_json(const MatchReport& r);
json to_json(const InterpolationReport& r);
json to_json(const NormBoundReport& r);
json to_json(const SupNorm& s);
json to_json(const TailReport& r);
json to_json(const ProofDecomposition& d);

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_text_file(const std::string& path);
/// Writes to `path`, or to stdout when path is empty or "-".
void write_text_file(const std::string& path, std::string_view text);
json read_json_file(const std::string& path);

/// Writes one RFC-4180 record (quoting fields that contain , " CR or LF).
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);
std::string csv_escape(std::string_view field);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// 64-bit FNV-1a of a string; used to tag sweep rows with their configuration.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Hash of the compact serialization of a JSON configuration.
std::string config_hash(const json& config);

}  // namespace spikesolve
