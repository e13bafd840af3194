#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "augeig/errors.hpp"
#include "augeig/runconfig.hpp"
#include "augeig/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"augeig: augmented-subspace sparse eigensolver driver"};
    std::string config_path;
    std::string mode_override;
    std::string out_override;
    int threads_override = 0;
    long long seed_override = -1;
    app.add_option("--config", config_path, "config file (key = value sections)")
        ->required();
    app.add_option("--mode", mode_override, "override run.mode");
    app.add_option("--threads", threads_override, "cap worker threads");
    app.add_option("--out", out_override, "override the output directory");
    app.add_option("--seed", seed_override, "override the RNG seed");
    CLI11_PARSE(app, argc, argv);

    std::string text;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "error: cannot open config '%s'\n", config_path.c_str());
            return 3;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }

    // overrides go through the same parser and validation as the file;
    // the duplicate-key warnings record what was overridden
    std::ostringstream extra;
    extra << "\n[run]\n";
    if (!mode_override.empty()) extra << "mode = " << mode_override << "\n";
    if (!out_override.empty()) extra << "out = " << out_override << "\n";
    if (threads_override > 0) extra << "threads = " << threads_override << "\n";
    if (seed_override >= 0) extra << "seed = " << seed_override << "\n";
    text += extra.str();

    try {
        const augeig::RunConfig cfg = augeig::parse_config(text);
        return augeig::run(cfg);
    } catch (const augeig::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 6;
    }
}
