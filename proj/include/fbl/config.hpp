#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbl/channel.hpp"
#include "fbl/simkit.hpp"

namespace fbl {

// Bad or inconsistent user input (maps to CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse a SystemConfig from JSON text. Power/noise keys accept a "_dbm"
// suffix for decibel-milliwatt input; per-user values accept a scalar
// (broadcast) or an array of length K_u. Large-scale fading comes from
// "gamma2", from "distances_m" (+ optional "shadow_db" std-dev, seeded), or
// from random placement in a disk via "cell_radius_m".
SystemConfig parse_system_config(const std::string& json_text);
SystemConfig default_config();

struct SweepSpec {
    std::string param;  // one of: N_b, L, T_c, tau_c, P, R_thres
    std::vector<double> values;
    SystemConfig base;
    std::vector<Scheme> schemes;
    std::vector<Mode> modes;
    std::vector<std::string> outputs;
    std::uint64_t seed = 1;
    double r_thres = 0.8;
    long n_trials = 10000;
    long n_channel_draws = 200;
    Averaging averaging = Averaging::conditional;
};

SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);

// Runs the sweep and streams CSV rows. Deterministic for a fixed spec.
void run_sweep(const SweepSpec& spec, std::ostream& out);
std::string run_sweep_to_string(const SweepSpec& spec);

// Runs the oracle/invariant suite. Returns true when every check passes;
// writes one line per check.
bool run_validate(const std::string& level, std::ostream& out);

// %.17g with '.' decimal regardless of locale.
std::string format_real(double v);

}  // namespace fbl
