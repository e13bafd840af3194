#include "augeig/runconfig.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "augeig/errors.hpp"

namespace augeig {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

long long to_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long r = 0;
    try {
        r = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer");
    }
    if (pos != v.size()) throw ConfigError("config: key '" + key + "' expects an integer");
    return r;
}

double to_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double r = 0.0;
    try {
        r = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number");
    }
    if (pos != v.size()) throw ConfigError("config: key '" + key + "' expects a number");
    return r;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::istringstream items(v);
    std::string item;
    while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: key '" + key + "' has an empty item");
        out.push_back(static_cast<int>(to_int(key, item)));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' expects a list");
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;

    const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
        setters{
            {"run.mode", [&](const std::string&, const std::string& v) { cfg.mode = v; }},
            {"run.out", [&](const std::string&, const std::string& v) { cfg.out_dir = v; }},
            {"run.seed",
             [&](const std::string& k, const std::string& v) {
                 cfg.seed = static_cast<unsigned long>(to_int(k, v));
             }},
            {"run.threads",
             [&](const std::string& k, const std::string& v) {
                 cfg.threads = static_cast<int>(to_int(k, v));
             }},
            {"mesh.coarse_n",
             [&](const std::string& k, const std::string& v) {
                 cfg.coarse_n = static_cast<int>(to_int(k, v));
             }},
            {"mesh.fine_n",
             [&](const std::string& k, const std::string& v) {
                 cfg.fine_n = static_cast<int>(to_int(k, v));
             }},
            {"mesh.lshape_n0",
             [&](const std::string& k, const std::string& v) {
                 cfg.lshape_n0 = static_cast<int>(to_int(k, v));
             }},
            {"mesh.rounds",
             [&](const std::string& k, const std::string& v) {
                 cfg.rounds = static_cast<int>(to_int(k, v));
             }},
            {"mesh.fraction",
             [&](const std::string& k, const std::string& v) { cfg.fraction = to_real(k, v); }},
            {"solver.nev",
             [&](const std::string& k, const std::string& v) {
                 cfg.nev = static_cast<int>(to_int(k, v));
             }},
            {"solver.tol",
             [&](const std::string& k, const std::string& v) { cfg.tol = to_real(k, v); }},
            {"solver.max_outer",
             [&](const std::string& k, const std::string& v) {
                 cfg.max_outer = static_cast<int>(to_int(k, v));
             }},
            {"solver.cg_max_iters",
             [&](const std::string& k, const std::string& v) {
                 cfg.cg_max_iters = static_cast<int>(to_int(k, v));
             }},
            {"solver.precond",
             [&](const std::string&, const std::string& v) { cfg.precond = v; }},
            {"batch.sizes",
             [&](const std::string& k, const std::string& v) {
                 cfg.batch_sizes = to_int_list(k, v);
             }},
            {"batch.oversample",
             [&](const std::string& k, const std::string& v) {
                 cfg.oversample = static_cast<int>(to_int(k, v));
             }},
            {"batch.shift_minus",
             [&](const std::string& k, const std::string& v) {
                 cfg.shift_minus = to_bool(k, v);
             }},
            {"files.a", [&](const std::string&, const std::string& v) { cfg.file_a = v; }},
            {"files.b", [&](const std::string&, const std::string& v) { cfg.file_b = v; }},
            {"files.p", [&](const std::string&, const std::string& v) { cfg.file_p = v; }},
            {"files.coarse_a",
             [&](const std::string&, const std::string& v) { cfg.file_coarse_a = v; }},
            {"files.coarse_b",
             [&](const std::string&, const std::string& v) { cfg.file_coarse_b = v; }},
        };

    std::set<std::string> seen;
    std::string section;
    std::istringstream lines(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(lines, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key at line " + std::to_string(lineno));
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = setters.find(full);
        if (it == setters.end()) throw ConfigError("config: unknown key '" + full + "'");
        if (!seen.insert(full).second)
            cfg.warnings.push_back("duplicate key '" + full + "' (last value wins)");
        it->second(full, value);
    }

    if (cfg.mode.empty()) throw ConfigError("config: missing required key 'run.mode'");
    static const std::set<std::string> modes{"square-convergence", "precond-compare", "batch",
                                             "adaptive-lshape", "algebraic"};
    if (!modes.count(cfg.mode)) throw ConfigError("config: unknown mode '" + cfg.mode + "'");
    if (!(cfg.tol > 0.0) || cfg.tol >= 1.0)
        throw ConfigError("config: key 'solver.tol' must lie in (0, 1)");
    static const std::set<std::string> preconds{"none", "a", "b", "b-a"};
    if (!preconds.count(cfg.precond))
        throw ConfigError("config: key 'solver.precond' must be none, a, b, or b-a");
    if (cfg.threads < 1) throw ConfigError("config: key 'run.threads' must be positive");
    if (cfg.mode == "batch" && cfg.batch_sizes.empty())
        throw ConfigError("config: missing required key 'batch.sizes'");
    if (cfg.mode == "algebraic" &&
        (cfg.file_a.empty() || cfg.file_b.empty() || cfg.file_p.empty()))
        throw ConfigError("config: algebraic mode needs 'files.a', 'files.b', and 'files.p'");
    return cfg;
}

}  // namespace augeig
