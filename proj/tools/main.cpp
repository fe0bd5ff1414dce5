#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "incsel/cli.hpp"
#include "incsel/io.hpp"

namespace {

struct RawOptions {
    std::string nu_text = "1000";
    std::string strategy = "self-similar:optimal";
    std::string out;
    std::string format = "csv";
    std::string config_file;
    std::uint64_t seed = 7;
    std::size_t reps = 1000;
    std::size_t grid = 101;
    std::size_t threads = 0;
    double beta = std::numeric_limits<double>::quiet_NaN();
    double kconst = std::numeric_limits<double>::quiet_NaN();
    bool fixture = false;
};

struct OptionHandles {
    CLI::Option* nu = nullptr;
    CLI::Option* strategy = nullptr;
    CLI::Option* reps = nullptr;
    CLI::Option* grid = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* threads = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* format = nullptr;
    CLI::Option* beta = nullptr;
    CLI::Option* kconst = nullptr;
    CLI::Option* fixture = nullptr;
    CLI::Option* config = nullptr;
};

OptionHandles add_common_options(CLI::App* cmd, RawOptions& raw) {
    OptionHandles h;
    h.strategy = cmd->add_option("--strategy", raw.strategy,
                                 "control tag (greedy, stationary, feasible-stationary, "
                                 "self-similar:stationary, self-similar:optimal, "
                                 "self-similar:beta=<x>, constant-c:<c>)");
    h.nu = cmd->add_option("--nu", raw.nu_text, "intensity, or comma-separated list");
    h.reps = cmd->add_option("--reps", raw.reps, "replicates (>= 1)");
    h.grid = cmd->add_option("--grid", raw.grid, "grid points (>= 2)");
    h.seed = cmd->add_option("--seed", raw.seed, "master seed");
    h.threads = cmd->add_option("--threads", raw.threads, "worker threads (0 = all cores)");
    h.out = cmd->add_option("--out", raw.out, "output file (default: print to stdout)");
    h.format = cmd->add_option("--format", raw.format, "csv or json");
    h.beta = cmd->add_option("--beta", raw.beta, "override calibrated window-slope bound");
    h.kconst = cmd->add_option("--K", raw.kconst, "override fitted additive constant");
    h.fixture = cmd->add_flag("--fixture-violate", raw.fixture,
                              "verify only: inject a synthetic inequality violation");
    h.config = cmd->add_option("--config", raw.config_file,
                               "JSON file supplying any flag (flags override it)");
    return h;
}

bool option_unset(const CLI::Option* opt) {
    return opt != nullptr && opt->count() == 0;
}

std::vector<double> parse_nu_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) {
            comma = text.size();
        }
        const std::string token = text.substr(start, comma - start);
        if (token.empty()) {
            throw std::invalid_argument("--nu: empty entry in '" + text + "'");
        }
        char* end = nullptr;
        const double value = std::strtod(token.c_str(), &end);
        if (end == nullptr || *end != '\0') {
            throw std::invalid_argument("--nu: cannot parse '" + token + "' as a number");
        }
        values.push_back(value);
        if (comma == text.size()) {
            break;
        }
        start = comma + 1;
    }
    if (values.empty()) {
        throw std::invalid_argument("--nu: no intensities given");
    }
    return values;
}

void apply_config_file(const std::string& path, const OptionHandles& h, RawOptions& raw) {
    std::ifstream in(path);
    if (!in) {
        throw incsel::IoError("cannot open config file: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) {
        throw std::invalid_argument("config file " + path + " must hold a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "nu") {
            if (!option_unset(h.nu)) {
                continue;
            }
            if (value.is_array()) {
                std::string joined;
                for (const auto& entry : value) {
                    if (!entry.is_number()) {
                        throw std::invalid_argument("config key 'nu': array entries must be numbers");
                    }
                    if (!joined.empty()) {
                        joined += ',';
                    }
                    joined += incsel::format_double(entry.get<double>());
                }
                raw.nu_text = joined;
            } else if (value.is_number()) {
                raw.nu_text = incsel::format_double(value.get<double>());
            } else if (value.is_string()) {
                raw.nu_text = value.get<std::string>();
            } else {
                throw std::invalid_argument("config key 'nu': expected number, string, or array");
            }
        } else if (key == "strategy") {
            if (!option_unset(h.strategy)) continue;
            raw.strategy = value.get<std::string>();
        } else if (key == "reps") {
            if (!option_unset(h.reps)) continue;
            raw.reps = value.get<std::size_t>();
        } else if (key == "grid") {
            if (!option_unset(h.grid)) continue;
            raw.grid = value.get<std::size_t>();
        } else if (key == "seed") {
            if (!option_unset(h.seed)) continue;
            raw.seed = value.get<std::uint64_t>();
        } else if (key == "threads") {
            if (!option_unset(h.threads)) continue;
            raw.threads = value.get<std::size_t>();
        } else if (key == "out") {
            if (!option_unset(h.out)) continue;
            raw.out = value.get<std::string>();
        } else if (key == "format") {
            if (!option_unset(h.format)) continue;
            raw.format = value.get<std::string>();
        } else if (key == "beta") {
            if (!option_unset(h.beta)) continue;
            raw.beta = value.get<double>();
        } else if (key == "K") {
            if (!option_unset(h.kconst)) continue;
            raw.kconst = value.get<double>();
        } else if (key == "fixture-violate") {
            if (!option_unset(h.fixture)) continue;
            raw.fixture = value.get<bool>();
        } else {
            throw std::invalid_argument("config file " + path + ": unknown key '" + key + "'");
        }
    }
}

int dispatch(const std::string& command, const RawOptions& raw) {
    incsel::ExperimentConfig config;
    config.command = command;
    config.nus = parse_nu_list(raw.nu_text);
    config.strategy = raw.strategy;
    config.replicates = raw.reps;
    config.grid_points = raw.grid;
    config.seed = raw.seed;
    config.threads = raw.threads;
    config.out_path = raw.out;
    config.format = raw.format;
    config.beta_override = raw.beta;
    config.k_override = raw.kconst;
    config.fixture_violate = raw.fixture;
    if (command == "simulate") {
        return incsel::cmd_simulate(config);
    }
    if (command == "limit") {
        return incsel::cmd_limit(config);
    }
    return incsel::cmd_verify(config);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"online increasing-subsequence selection laboratory"};
    app.require_subcommand(1);
    RawOptions raw;
    CLI::App* sim = app.add_subcommand("simulate", "sample selection paths and a moment report");
    CLI::App* lim = app.add_subcommand("limit", "limit pair process: closed-form vs Monte Carlo covariances");
    CLI::App* ver = app.add_subcommand("verify", "run the audit suite (exit 1 on any failure)");
    const OptionHandles hs = add_common_options(sim, raw);
    const OptionHandles hl = add_common_options(lim, raw);
    const OptionHandles hv = add_common_options(ver, raw);
    try {
        app.parse(argc, argv);
        std::string command;
        const OptionHandles* handles = nullptr;
        if (sim->parsed()) {
            command = "simulate";
            handles = &hs;
        } else if (lim->parsed()) {
            command = "limit";
            handles = &hl;
        } else {
            command = "verify";
            handles = &hv;
        }
        if (handles->config->count() > 0) {
            apply_config_file(raw.config_file, *handles, raw);
        }
        return dispatch(command, raw);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const incsel::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
