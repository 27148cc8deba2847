#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hopf::cli {

/// Fully resolved run: defaults, then the JSON config file, then flags.
struct RunConfig {
    std::string command;
    double alpha = 1.0, beta = 1.0, a = 1.0, b = 1.0, sigma = 1.0;
    double dt = 1e-3;
    double T = 0.0;  // 0 = command default
    double burn_in = 100.0;
    int renorm_every = 10;
    std::uint64_t seed = 1;
    std::uint64_t n = 0;  // 0 = command default
    int bins = 50;
    std::vector<double> checkpoints;
    std::string grid = "0:10:17,-2:2:17";
    int seeds = 4;
    double refine_T = 1e4;
    double x0 = 0.0, y0 = 0.0;
    double pullback = 0.0;
    bool tangent = false;
    bool certify = false;
    unsigned threads = 0;  // 0 = hardware parallelism
    std::string out;       // empty = no files (bounds, verify) or "hopf_out"
};

/// Command-specific defaults for T, n and out filled in.
RunConfig defaults_for(const std::string& command);

std::string to_json(const RunConfig& cfg);
/// Flat JSON object; unknown keys and wrong types throw invalid_argument. Missing keys keep `base`.
RunConfig merge_json(RunConfig base, const std::string& text);

/// FNV-1a 64 of the canonical JSON with out, threads and config excluded; 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Exit codes: 0 success (or help), 1 usage or validation error, 2 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace hopf::cli
