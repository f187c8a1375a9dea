#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fbl/config.hpp"
#include "fbl/noncoherent.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fbl::ConfigError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_rate(const std::string& config_path, const std::string& scheme_s,
             const std::string& mode_s, int user, std::uint64_t seed) {
    fbl::SystemConfig cfg = config_path.empty()
                                ? fbl::default_config()
                                : fbl::parse_system_config(read_file(config_path));
    fbl::Scheme scheme =
        scheme_s == "zf" ? fbl::Scheme::zf : fbl::Scheme::mrc;
    if (scheme_s != "zf" && scheme_s != "mrc")
        throw fbl::ConfigError("--scheme must be mrc|zf");
    fbl::Mode mode;
    if (mode_s == "coherent")
        mode = fbl::Mode::coherent;
    else if (mode_s == "noncoherent")
        mode = fbl::Mode::noncoherent;
    else
        throw fbl::ConfigError("--mode must be coherent|noncoherent");
    if (mode == fbl::Mode::coherent && cfg.pilot_len >= cfg.coherence)
        throw fbl::ConfigError("tau_c must be below T_c");
    cfg.validate(mode);
    if (user < 0 || user >= cfg.n_users)
        throw fbl::ConfigError("--user out of range");

    // single evaluation printed as one CSV row (with header)
    fbl::SweepSpec spec;
    spec.param = "N_b";
    spec.values = {double(cfg.n_antennas)};
    spec.base = cfg;
    spec.schemes = {scheme};
    spec.modes = {mode};
    spec.outputs = {"rate"};
    spec.seed = seed;
    std::string csv = fbl::run_sweep_to_string(spec);
    // keep only the header and the requested user's row
    std::istringstream rows(csv);
    std::string line;
    int row = -1;
    while (std::getline(rows, line)) {
        if (row == -1 || row == user) std::cout << line << '\n';
        ++row;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Finite-blocklength multiuser MIMO uplink analysis toolkit: "
        "achievable-rate reports, Monte Carlo validation, parameter sweeps"};
    app.require_subcommand(1);

    std::string config_path, scheme = "mrc", mode = "coherent";
    int user = 0;
    std::uint64_t seed = 1;
    auto* rate = app.add_subcommand("rate", "Evaluate one rate report row");
    rate->add_option("--config", config_path, "JSON system config");
    rate->add_option("--scheme", scheme, "mrc|zf");
    rate->add_option("--mode", mode, "coherent|noncoherent");
    rate->add_option("--user", user, "user index");
    rate->add_option("--seed", seed, "channel seed");

    std::string spec_path, out_path;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep to CSV");
    sweep->add_option("--spec", spec_path, "JSON sweep spec")->required();
    sweep->add_option("--out", out_path, "output CSV path")->required();

    std::string level = "quick";
    auto* validate =
        app.add_subcommand("validate", "Run the oracle/invariant suite");
    validate->add_option("--level", level, "quick|full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (rate->parsed()) return cmd_rate(config_path, scheme, mode, user, seed);
        if (sweep->parsed()) {
            fbl::SweepSpec spec = fbl::load_sweep_spec(spec_path);
            std::ofstream out(out_path);
            if (!out)
                throw fbl::ConfigError("cannot open output file: " + out_path);
            fbl::run_sweep(spec, out);
            return kExitOk;
        }
        if (validate->parsed())
            return fbl::run_validate(level, std::cout) ? kExitOk
                                                       : kExitValidationFailure;
    } catch (const fbl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidationFailure;
    }
    return kExitConfigError;
}
