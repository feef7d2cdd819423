#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "spikesolve/errors.hpp"
#include "spikesolve/io.hpp"
#include "spikesolve/rng.hpp"

using namespace spikesolve;

TEST_SUITE("io") {

TEST_CASE("measure and polynomial survive a text round trip") {
    CounterRng rng(5);
    std::vector<Spike> s;
    for (int j = 0; j < 6; ++j) s.push_back({TorusPoint(rng.uniform()), rng.normal_pair() * 1e-3});
    const DiscreteMeasure mu(s);
    const auto back = measure_from_json(json::parse(to_json(mu).dump()));
    REQUIRE(back.size() == mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) {
        CHECK(std::abs(back.spikes()[j].position.value() - mu.spikes()[j].position.value()) <= 1e-15);
        CHECK(std::abs(back.spikes()[j].amplitude - mu.spikes()[j].amplitude) <= 1e-15 * std::abs(mu.spikes()[j].amplitude));
    }
    const TrigPoly p = project(mu, 9);
    const TrigPoly q = trigpoly_from_json(json::parse(to_json(p).dump()));
    CHECK(q.degree() == 9);
    for (int m = -9; m <= 9; ++m) CHECK(std::abs(q.coeff(m) - p.coeff(m)) <= 1e-15 * std::abs(p.coeff(m)));
}

TEST_CASE("configs round trip") {
    NoiseSpec n;
    n.kind = NoiseKind::bounded;
    n.epsilon = 0.125;
    n.seed = 0xdeadbeefcafeULL;
    const auto n2 = noise_spec_from_json(to_json(n));
    CHECK(n2.kind == n.kind);
    CHECK(n2.epsilon == n.epsilon);
    CHECK(n2.seed == n.seed);

    SolverConfig c;
    c.grid_factor = 8;
    c.gap_tolerance = 3e-11;
    c.restrict_to_grid = true;
    const auto c2 = solver_config_from_json(to_json(c));
    CHECK(c2.grid_factor == 8);
    CHECK(c2.gap_tolerance == 3e-11);
    CHECK(c2.restrict_to_grid);
    CHECK(config_hash(to_json(c)) == config_hash(to_json(c2)));
    CHECK(config_hash(to_json(c)) != config_hash(to_json(SolverConfig{})));
}

TEST_CASE("malformed input is reported") {
    CHECK_THROWS(measure_from_json(json::parse(R"({"spikes":[{"pos":0.1}]})")));
    CHECK_THROWS_AS(read_text_file("/nonexistent/file.json"), IoError);
    const auto path = (std::filesystem::temp_directory_path() / "spikesolve_bad.json").string();
    write_text_file(path, "{not json");
    CHECK_THROWS_AS(read_json_file(path), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("csv quoting") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    std::ostringstream os;
    write_csv_row(os, {"x", "1,2", ""});
    CHECK(os.str() == "x,\"1,2\",\r\n");
}

TEST_CASE("number formatting and hashing") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(255) == "00000000000000ff");
}

}
