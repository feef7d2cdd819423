// Runs the nine acceptance sweeps and prints one verdict line per criterion.
//   acceptance [--out-dir DIR] [suite ...]
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "spikesolve/io.hpp"
#include "spikesolve/kernels.hpp"
#include "spikesolve/suites.hpp"

using namespace spikesolve;

namespace {

// Midpoint rule for the integral of the closed-form G over one period. The
// integrand is a trigonometric polynomial of degree <= M, so Q > M points are exact
// up to rounding; use many more to keep the check independent of that fact.
double mean_by_quadrature(int M) {
    const double n = M / 2 + 1;
    constexpr int Q = 1 << 16;
    double s = 0.0;
    for (int k = 0; k < Q; ++k) {
        const double x = (k + 0.5) / Q;
        const double r = std::sin(n * M_PI * x) / (n * std::sin(M_PI * x));
        s += r * r * r * r;
    }
    return s / Q;
}

}  // namespace

int main(int argc, char** argv) {
    std::string out_dir;
    std::vector<std::string> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out-dir" && i + 1 < argc) {
            out_dir = argv[++i];
        } else {
            selected.push_back(arg);
        }
    }
    if (selected.empty()) selected = suite_names();
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    int failures = 0;
    double total = 0.0;
    for (const auto& name : selected) {
        SuiteOutcome r;
        try {
            r = run_suite(name);
        } catch (const std::exception& e) {
            std::printf("[FAIL] %-22s error: %s\n", name.c_str(), e.what());
            std::fflush(stdout);
            ++failures;
            continue;
        }
        if (name == "kernels") {
            // Independent check of the mean of G against numerical quadrature.
            double worst = 0.0;
            for (int M : {128, 129, 256, 512}) {
                const double c0 = g_kernel(M).spectral_form().coeff(0).real();
                worst = std::max(worst, std::abs(c0 - mean_by_quadrature(M)));
            }
            const bool ok = worst <= 1e-9;
            r.pass = r.pass && ok;
            char buf[96];
            std::snprintf(buf, sizeof buf, "; mean of G vs quadrature %.3e%s", worst, ok ? "" : " (FAIL)");
            r.summary += buf;
        }
        total += r.seconds;
        std::printf("[%s] criterion %d %-22s %s\n", r.pass ? "PASS" : "FAIL", r.criterion,
                    r.name.c_str(), r.summary.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
        if (!out_dir.empty()) {
            const auto base = std::filesystem::path(out_dir) / r.name;
            write_text_file(base.string() + ".csv", suite_csv(r));
            write_text_file(base.string() + ".json", r.details.dump(2) + "\n");
        }
    }
    std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(selected.size()) - failures,
                selected.size(), total);
    return failures == 0 ? 0 : 1;
}
