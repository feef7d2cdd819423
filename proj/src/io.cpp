#include "spikesolve/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spikesolve/errors.hpp"

namespace spikesolve {

namespace {

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw IoError(std::string("missing JSON field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw IoError(std::string("bad JSON field '") + key + "': " + e.what());
    }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? field<T>(j, key) : fallback;
}

json spike_array(const DiscreteMeasure& mu) {
    json arr = json::array();
    for (const auto& s : mu.spikes()) {
        arr.push_back({{"pos", s.position.value()}, {"re", s.amplitude.real()}, {"im", s.amplitude.imag()}});
    }
    return arr;
}

}  // namespace

json to_json(const DiscreteMeasure& mu) { return {{"spikes", spike_array(mu)}}; }

DiscreteMeasure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("spikes") || !j.at("spikes").is_array()) {
        throw IoError("measure JSON needs a 'spikes' array");
    }
    std::vector<Spike> spikes;
    for (const auto& s : j.at("spikes")) {
        spikes.push_back({TorusPoint(field<double>(s, "pos")),
                          complex{field<double>(s, "re"), field_or<double>(s, "im", 0.0)}});
    }
    return DiscreteMeasure(std::move(spikes));
}

json to_json(const TrigPoly& p) {
    json coeffs = json::array();
    for (auto c : p.coeffs()) coeffs.push_back({c.real(), c.imag()});
    return {{"degree", p.degree()}, {"coeffs", coeffs}};
}

TrigPoly trigpoly_from_json(const json& j) {
    const int degree = field<int>(j, "degree");
    if (degree < 0) throw IoError("polynomial degree must be nonnegative");
    const json& arr = j.contains("coeffs") ? j.at("coeffs") : json();
    if (!arr.is_array()) throw IoError("polynomial JSON needs a 'coeffs' array");
    std::vector<complex> coeffs;
    for (const auto& c : arr) {
        if (!c.is_array() || c.size() != 2) throw IoError("coefficients must be [re, im] pairs");
        coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    if (coeffs.size() != 2 * static_cast<std::size_t>(degree) + 1) {
        throw IoError("polynomial of degree " + std::to_string(degree) + " needs " +
                      std::to_string(2 * degree + 1) + " coefficients");
    }
    return TrigPoly(degree, std::move(coeffs));
}

json to_json(const NoiseSpec& spec) {
    json j = {{"kind", to_string(spec.kind)}, {"sigma", spec.sigma}, {"gamma", spec.gamma},
              {"seed", spec.seed}};
    if (spec.kind == NoiseKind::bounded) j["epsilon"] = spec.epsilon;
    return j;
}

NoiseSpec noise_spec_from_json(const json& j) {
    NoiseSpec s;
    try {
        s.kind = noise_kind_from_string(field_or<std::string>(j, "kind", "gaussian"));
    } catch (const ParameterError& e) {
        throw IoError(e.what());
    }
    s.sigma = field_or<double>(j, "sigma", 0.0);
    s.gamma = field_or<double>(j, "gamma", s.gamma);
    s.epsilon = field_or<double>(j, "epsilon", 0.0);
    s.seed = field_or<std::uint64_t>(j, "seed", 0);
    return s;
}

json to_json(const SolverConfig& c) {
    return {{"grid_factor", c.grid_factor},         {"max_iterations", c.max_iterations},
            {"gap_tolerance", c.gap_tolerance},     {"refine_positions", c.refine_positions},
            {"merge_tolerance", c.merge_tolerance}, {"restrict_to_grid", c.restrict_to_grid}};
}

SolverConfig solver_config_from_json(const json& j) {
    SolverConfig c;
    c.grid_factor = field_or<int>(j, "grid_factor", c.grid_factor);
    c.max_iterations = field_or<int>(j, "max_iterations", c.max_iterations);
    c.gap_tolerance = field_or<double>(j, "gap_tolerance", c.gap_tolerance);
    c.refine_positions = field_or<bool>(j, "refine_positions", c.refine_positions);
    c.merge_tolerance = field_or<double>(j, "merge_tolerance", c.merge_tolerance);
    c.restrict_to_grid = field_or<bool>(j, "restrict_to_grid", c.restrict_to_grid);
    return c;
}

json to_json(const SolveResult& r) {
    return {{"measure", to_json(r.measure)},
            {"residual_l2", r.residual_l2},
            {"duality_gap", r.duality_gap},
            {"objective", r.objective},
            {"tau", r.tau},
            {"iterations", r.iterations},
            {"objective_trace", r.objective_trace},
            {"converged", r.converged},
            {"status", r.status},
            {"path_solves", r.path_solves}};
}

json to_json(const ApproximationReport& r) {
    return {{"total_variation", r.total_variation},
            {"reference_total_variation", r.reference_total_variation},
            {"l2_distance", r.l2_distance},
            {"linf_distance", r.linf_distance},
            {"tv_ok", r.tv_ok},
            {"l2_ok", r.l2_ok},
            {"pass", r.pass()}};
}

json to_json(const MatchReport& r) {
    return {{"max_position_error", r.max_position_error},
            {"max_amplitude_error", r.max_amplitude_error},
            {"unmatched_mass", r.unmatched_mass},
            {"recovered", r.recovered}};
}

json to_json(const InterpolationReport& r) {
    return {{"value_error", r.value_error},
            {"derivative_error", r.derivative_error},
            {"scale", r.scale},
            {"pass", r.pass}};
}

json to_json(const NormBoundReport& r) {
    return {{"inv_d0", r.inv_d0},
            {"d1_over_m", r.d1_over_m},
            {"schur_inv_times_m2", r.schur_inv_times_m2}};
}

json to_json(const SupNorm& s) {
    return {{"grid_max", s.grid_max},     {"upper_bound", s.upper_bound}, {"correction", s.correction},
            {"argmax", s.argmax},         {"grid_size", s.grid_size},     {"certified", s.certified}};
}

json to_json(const TailReport& r) {
    return {{"trials", r.trials},
            {"exceedances", r.exceedances},
            {"frequency", r.frequency},
            {"bound", r.bound},
            {"standard_error", r.standard_error},
            {"chi2_mean", r.chi2_mean},
            {"chi2_variance", r.chi2_variance},
            {"pass", r.pass}};
}

json to_json(const ProofDecomposition& d) {
    return {{"x0", d.x0},
            {"value", d.value},
            {"affine_term", d.affine_term},
            {"second_moment_term", d.second_moment_term},
            {"far_term", d.far_term},
            {"total", d.total()}};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(fields[i]);
    }
    os << "\r\n";
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string config_hash(const json& config) { return hex64(fnv1a64(config.dump())); }

}  // namespace spikesolve
