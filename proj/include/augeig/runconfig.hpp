#pragma once

#include <string>
#include <vector>

namespace augeig {

// Parsed experiment description. See README for the config file format:
// '#' comments, [section] headers, key = value lines.
struct RunConfig {
    // [run]
    std::string mode;  // square-convergence | precond-compare | batch |
                       // adaptive-lshape | algebraic
    std::string out_dir = "out";
    unsigned long seed = 0x5eedUL;
    int threads = 1;

    // [mesh]
    int coarse_n = 16;
    int fine_n = 128;
    int lshape_n0 = 2;
    int rounds = 12;
    double fraction = 0.4;

    // [solver]
    int nev = 1;
    double tol = 1e-8;
    int max_outer = 30;
    int cg_max_iters = 40;
    std::string precond = "none";  // none | a | b | b-a

    // [batch]
    std::vector<int> batch_sizes;
    int oversample = 0;  // 0 = solver default
    bool shift_minus = false;

    // [files]
    std::string file_a, file_b, file_p, file_coarse_a, file_coarse_b;

    // duplicate-key records and similar non-fatal diagnostics
    std::vector<std::string> warnings;
};

// Throws ConfigError naming the first offending key. Duplicate keys keep
// the last value and leave a warning record.
RunConfig parse_config(const std::string& text);

}  // namespace augeig
