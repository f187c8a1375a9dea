#include "fbl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fbl/noncoherent.hpp"
#include "fbl/rng.hpp"

namespace fbl {

using nlohmann::json;

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("JSON parse error: ") + e.what());
    }
}

void check_keys(const json& j, const std::set<std::string>& known,
                const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            bad(std::string("unknown key \"") + it.key() + "\" in " + where);
}

// Scalar-or-array per-user field, with optional dBm variant.
std::vector<double> per_user(const json& j, const std::string& key, int n,
                             double fallback, bool fallback_valid) {
    std::string dbm_key = key + "_dbm";
    bool has_lin = j.contains(key), has_dbm = j.contains(dbm_key);
    if (has_lin && has_dbm) bad("both \"" + key + "\" and \"" + dbm_key + "\" given");
    if (!has_lin && !has_dbm) {
        if (!fallback_valid) bad("missing required key \"" + key + "\"");
        return std::vector<double>(n, fallback);
    }
    const json& v = j.at(has_lin ? key : dbm_key);
    std::vector<double> out;
    if (v.is_array()) {
        if (int(v.size()) != n)
            bad("\"" + key + "\" array must have K_u entries");
        for (const auto& e : v) out.push_back(e.get<double>());
    } else {
        out.assign(n, v.get<double>());
    }
    if (has_dbm)
        for (double& x : out) x = dbm_to_mw(x);
    return out;
}

double scalar(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::vector<double> resolve_large_scale(const json& j, int n_users) {
    int sources = int(j.contains("gamma2")) + int(j.contains("distances_m")) +
                  int(j.contains("cell_radius_m"));
    if (sources > 1)
        bad("give only one of gamma2 / distances_m / cell_radius_m");
    std::uint64_t pseed =
        j.contains("placement_seed") ? j.at("placement_seed").get<std::uint64_t>() : 1;
    double shadow_sd = scalar(j, "shadow_db", 0.0);
    Rng rng(pseed, kTagPlacement, 0, 0);
    std::vector<double> g2(n_users);
    if (j.contains("gamma2") || sources == 0) {
        // default when nothing is given: every user at 100 m, no shadowing
        if (!j.contains("gamma2")) {
            for (double& g : g2) g = pathloss(100.0);
            return g2;
        }
        const json& v = j.at("gamma2");
        if (v.is_array()) {
            if (int(v.size()) != n_users) bad("gamma2 needs K_u entries");
            for (int k = 0; k < n_users; ++k) g2[k] = v[k].get<double>();
        } else {
            g2.assign(n_users, v.get<double>());
        }
        return g2;
    }
    std::vector<double> d(n_users);
    if (j.contains("distances_m")) {
        const json& v = j.at("distances_m");
        if (v.is_array()) {
            if (int(v.size()) != n_users) bad("distances_m needs K_u entries");
            for (int k = 0; k < n_users; ++k) d[k] = v[k].get<double>();
        } else {
            d.assign(n_users, v.get<double>());
        }
    } else {
        double radius = j.at("cell_radius_m").get<double>();
        double d_min = scalar(j, "min_distance_m", 1.0);
        if (!(radius > d_min)) bad("cell_radius_m must exceed min_distance_m");
        for (int k = 0; k < n_users; ++k) {
            // uniform over the annulus area
            double u = rng.uniform();
            d[k] = std::sqrt(d_min * d_min + u * (radius * radius - d_min * d_min));
        }
    }
    for (int k = 0; k < n_users; ++k) {
        double shadow = shadow_sd > 0 ? shadow_sd * rng.normal() : 0.0;
        g2[k] = pathloss(d[k], shadow);
    }
    return g2;
}

SystemConfig config_from_json(const json& j) {
    static const std::set<std::string> known = {
        "N_b", "K_u", "L", "T_c", "tau_c",
        "P", "P_dbm", "P_pilot", "P_pilot_dbm",
        "noise", "noise_dbm", "noise_pilot", "noise_pilot_dbm",
        "gamma2", "distances_m", "cell_radius_m", "min_distance_m",
        "shadow_db", "placement_seed",
        "msg_nats", "target_eps", "mu", "mu_policy", "power_scaling"};
    check_keys(j, known, "config");
    SystemConfig c;
    c.n_antennas = int(scalar(j, "N_b", 20));
    c.n_users = int(scalar(j, "K_u", 5));
    c.n_blocks = int(scalar(j, "L", 10));
    c.coherence = int(scalar(j, "T_c", 20));
    c.pilot_len = int(scalar(j, "tau_c", 5));
    c.tx_power_data = per_user(j, "P", c.n_users, dbm_to_mw(10.0), true);
    bool has_pilot_p = j.contains("P_pilot") || j.contains("P_pilot_dbm");
    c.tx_power_pilot = has_pilot_p
                           ? per_user(j, "P_pilot", c.n_users, 0, false)
                           : c.tx_power_data;
    double noise = j.contains("noise_dbm") ? dbm_to_mw(j.at("noise_dbm").get<double>())
                                           : scalar(j, "noise", dbm_to_mw(-100.0));
    c.noise_data = noise;
    c.noise_pilot = j.contains("noise_pilot_dbm")
                        ? dbm_to_mw(j.at("noise_pilot_dbm").get<double>())
                        : scalar(j, "noise_pilot", noise);
    c.large_scale = resolve_large_scale(j, c.n_users);
    c.msg_nats = per_user(j, "msg_nats", c.n_users, 100.0, true);
    c.target_eps = per_user(j, "target_eps", c.n_users, 1e-5, true);
    c.mu_value = scalar(j, "mu", 0.5);
    std::string mp = j.contains("mu_policy") ? j.at("mu_policy").get<std::string>()
                                             : "fixed";
    if (mp == "fixed")
        c.mu_policy = MuPolicy::fixed;
    else if (mp == "uniform")
        c.mu_policy = MuPolicy::uniform;
    else
        bad("mu_policy must be fixed|uniform");
    std::string ps = j.contains("power_scaling")
                         ? j.at("power_scaling").get<std::string>()
                         : "none";
    if (ps == "none")
        c.power_scaling = PowerScaling::none;
    else if (ps == "inverse_Nb")
        c.power_scaling = PowerScaling::inverse_Nb;
    else if (ps == "inverse_sqrt_Nb")
        c.power_scaling = PowerScaling::inverse_sqrt_Nb;
    else
        bad("power_scaling must be none|inverse_Nb|inverse_sqrt_Nb");
    return c;
}

Scheme scheme_from(const std::string& s) {
    if (s == "mrc") return Scheme::mrc;
    if (s == "zf") return Scheme::zf;
    bad("scheme must be mrc|zf");
}

Mode mode_from(const std::string& s) {
    if (s == "coherent") return Mode::coherent;
    if (s == "noncoherent") return Mode::noncoherent;
    bad("mode must be coherent|noncoherent");
}

const char* scheme_name(Scheme s) { return s == Scheme::mrc ? "mrc" : "zf"; }
const char* mode_name(Mode m) {
    return m == Mode::coherent ? "coherent" : "noncoherent";
}

const std::set<std::string> kAnalyticOutputs = {"rate", "dispersion",
                                                "perturbation", "asymptotics"};
const std::set<std::string> kMcOutputs = {"eps", "packet_loss",
                                          "cdf_validation"};

SystemConfig apply_param(const SweepSpec& spec, double value, double* r_thres) {
    SystemConfig c = spec.base;
    *r_thres = spec.r_thres;
    if (spec.param == "N_b")
        c.n_antennas = int(value);
    else if (spec.param == "L")
        c.n_blocks = int(value);
    else if (spec.param == "T_c")
        c.coherence = int(value);
    else if (spec.param == "tau_c")
        c.pilot_len = int(value);
    else if (spec.param == "P") {
        double p = dbm_to_mw(value);
        c.tx_power_data.assign(c.n_users, p);
        c.tx_power_pilot.assign(c.n_users, p);
    } else if (spec.param == "R_thres")
        *r_thres = value;
    else
        bad("sweep param must be one of N_b|L|T_c|tau_c|P|R_thres");
    return c;
}

void emit_rate_row(std::ostream& out, Scheme scheme, Mode mode,
                   const SystemConfig& cfg, int user, const EvaluatedRate& er) {
    const RateReport& r = er.report;
    out << scheme_name(scheme) << ',' << mode_name(mode) << ','
        << cfg.n_antennas << ',' << cfg.n_users << ',' << cfg.n_blocks << ','
        << cfg.coherence << ',' << cfg.pilot_len << ',' << user << ','
        << format_real(r.mean_capacity) << ',' << format_real(r.mean_dispersion)
        << ',' << format_real(r.perturbation) << ',' << format_real(r.q_thres)
        << ',' << format_real(r.rate_normal) << ',' << format_real(r.rate_band)
        << ',' << format_real(r.eps_beclt) << ',' << format_real(r.eps_taylor)
        << ',' << (r.condition_ok ? 1 : 0);
    if (mode == Mode::noncoherent)
        out << ',' << format_real(er.beta_y) << ',' << format_real(er.beta_n)
            << ',' << format_real(er.rho) << ',' << format_real(er.delta);
    else
        out << ",,,,";
    out << '\n';
}

void emit_asymptotic_row(std::ostream& out, Scheme scheme, Mode mode,
                         const SystemConfig& cfg, int user, double cap,
                         double disp, double pert, double beta_y, double beta_n,
                         double rho, double delta) {
    out << scheme_name(scheme) << ',' << mode_name(mode) << ','
        << "inf" << ',' << cfg.n_users << ',' << cfg.n_blocks << ','
        << cfg.coherence << ',' << cfg.pilot_len << ',' << user << ','
        << format_real(cap) << ',' << format_real(disp) << ','
        << format_real(pert) << ",,,,,,";
    if (mode == Mode::noncoherent)
        out << ',' << format_real(beta_y) << ',' << format_real(beta_n) << ','
            << format_real(rho) << ',' << format_real(delta);
    else
        out << ",,,,";
    out << '\n';
}

void emit_estimate_row(std::ostream& out, const std::string& estimator,
                       Scheme scheme, Mode mode, const SystemConfig& cfg,
                       int user, const Estimate& e, std::uint64_t seed) {
    out << estimator << ',' << scheme_name(scheme) << ',' << mode_name(mode)
        << ',' << cfg.n_antennas << ',' << cfg.n_users << ',' << cfg.n_blocks
        << ',' << cfg.coherence << ',' << cfg.pilot_len << ',' << user << ','
        << format_real(e.value) << ',' << format_real(e.std_err) << ','
        << e.n_trials << ',' << seed << '\n';
}

}  // namespace

SystemConfig parse_system_config(const std::string& json_text) {
    return config_from_json(parse_json(json_text));
}

SystemConfig default_config() { return config_from_json(json::object()); }

SweepSpec parse_sweep_spec(const std::string& json_text) {
    json j = parse_json(json_text);
    static const std::set<std::string> known = {
        "param", "values", "schemes", "modes", "outputs", "seed",
        "config", "r_thres", "n_trials", "n_channel_draws", "averaging"};
    check_keys(j, known, "sweep spec");
    SweepSpec s;
    if (!j.contains("param")) bad("sweep spec needs \"param\"");
    s.param = j.at("param").get<std::string>();
    if (!j.contains("values") || !j.at("values").is_array() ||
        j.at("values").empty())
        bad("sweep spec needs a nonempty \"values\" array");
    for (const auto& v : j.at("values")) s.values.push_back(v.get<double>());
    s.base = config_from_json(j.contains("config") ? j.at("config")
                                                   : json::object());
    if (j.contains("schemes"))
        for (const auto& v : j.at("schemes"))
            s.schemes.push_back(scheme_from(v.get<std::string>()));
    else
        s.schemes = {Scheme::mrc, Scheme::zf};
    if (j.contains("modes"))
        for (const auto& v : j.at("modes"))
            s.modes.push_back(mode_from(v.get<std::string>()));
    else
        s.modes = {Mode::coherent};
    if (!j.contains("outputs") || !j.at("outputs").is_array() ||
        j.at("outputs").empty())
        bad("sweep spec needs a nonempty \"outputs\" array");
    for (const auto& v : j.at("outputs"))
        s.outputs.push_back(v.get<std::string>());
    s.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 1;
    s.r_thres = scalar(j, "r_thres", 0.8);
    s.n_trials = long(scalar(j, "n_trials", 10000));
    s.n_channel_draws = long(scalar(j, "n_channel_draws", 200));
    if (j.contains("averaging")) {
        std::string a = j.at("averaging").get<std::string>();
        if (a == "conditional")
            s.averaging = Averaging::conditional;
        else if (a == "averaged")
            s.averaging = Averaging::averaged;
        else
            bad("averaging must be conditional|averaged");
    }
    return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open sweep spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec(ss.str());
}

void run_sweep(const SweepSpec& spec, std::ostream& out) {
    bool analytic = false, mc = false;
    for (const std::string& o : spec.outputs) {
        if (kAnalyticOutputs.count(o))
            analytic = true;
        else if (kMcOutputs.count(o))
            mc = true;
        else
            bad("unknown output \"" + o + "\"");
    }
    if (analytic && mc)
        bad("analytic outputs (rate/dispersion/perturbation/asymptotics) and "
            "Monte Carlo outputs (eps/packet_loss/cdf_validation) use "
            "different row schemas; run them as separate sweeps");
    if (spec.schemes.empty() || spec.modes.empty())
        bad("sweep spec needs at least one scheme and one mode");
    auto has_output = [&](const char* name) {
        for (const std::string& o : spec.outputs)
            if (o == name) return true;
        return false;
    };

    if (analytic)
        out << "scheme,mode,N_b,K_u,L,T_c,tau_c,user,meanI,meanV,U,q_thres,"
               "R_app,rate_band,eps_beclt,eps_taylor,condition_ok,beta_y,"
               "beta_n,rho,delta\n";
    else
        out << "estimator,scheme,mode,N_b,K_u,L,T_c,tau_c,user,value,std_err,"
               "n_trials,seed\n";

    for (double value : spec.values) {
        double r_thres;
        SystemConfig cfg = apply_param(spec, value, &r_thres);
        for (Mode mode : spec.modes) {
            try {
                cfg.validate(mode);
            } catch (const std::invalid_argument& e) {
                bad(std::string(e.what()) + " (sweep value " +
                    format_real(value) + ")");
            }
            for (Scheme scheme : spec.schemes) {
                if (scheme == Scheme::zf && cfg.n_users > cfg.n_antennas)
                    bad("zero-forcing needs K_u <= N_b (sweep value " +
                        format_real(value) + ")");
            }
            if (analytic) {
                bool want_rate = has_output("rate") ||
                                 has_output("dispersion") ||
                                 has_output("perturbation");
                ChannelSet ch;
                if (want_rate) ch = draw_channels(cfg, mode, spec.seed);
                for (Scheme scheme : spec.schemes) {
                    for (int k = 0; k < cfg.n_users; ++k) {
                        if (want_rate) {
                            EvaluatedRate er = evaluate_rate(
                                ch, cfg, scheme, mode, k, cfg.mu_value);
                            emit_rate_row(out, scheme, mode, cfg, k, er);
                        }
                        if (has_output("asymptotics")) {
                            if (mode == Mode::coherent) {
                                double snr = cfg.tx_power_data[k] *
                                             cfg.large_scale[k] /
                                             cfg.noise_data;
                                AsymptoticReport a = asymptotics_coherent(
                                    cfg.power_scaling, snr, cfg.n_blocks,
                                    cfg.coherence);
                                emit_asymptotic_row(out, scheme, mode, cfg, k,
                                                    a.capacity, a.dispersion,
                                                    a.perturbation, 0, 0, 0, 0);
                            } else {
                                NoncoherentAsymptotics a =
                                    asymptotics_noncoherent(cfg, scheme, k,
                                                            cfg.n_blocks);
                                emit_asymptotic_row(out, scheme, mode, cfg, k,
                                                    a.capacity, a.dispersion,
                                                    a.perturbation, a.beta_y,
                                                    a.beta_n, a.rho, a.delta);
                            }
                        }
                    }
                }
            } else {
                TrialPlan plan;
                plan.n_signal_draws = spec.n_trials;
                plan.n_channel_draws = spec.n_channel_draws;
                plan.master_seed = spec.seed;
                plan.mu_policy = cfg.mu_policy;
                plan.mu_value = cfg.mu_value;
                plan.averaging = spec.averaging;
                for (Scheme scheme : spec.schemes) {
                    for (int k = 0; k < cfg.n_users; ++k) {
                        if (has_output("eps")) {
                            Estimate e =
                                rcu_error_estimate(cfg, scheme, mode, plan, k);
                            emit_estimate_row(out, "rcu_eps", scheme, mode, cfg,
                                              k, e, spec.seed);
                        }
                        if (has_output("packet_loss")) {
                            PacketLossResult r = packet_loss(
                                cfg, scheme, mode, r_thres, plan, k);
                            emit_estimate_row(out, "packet_loss", scheme, mode,
                                              cfg, k, r.pr_loss, spec.seed);
                            emit_estimate_row(out, "outage_infinite", scheme,
                                              mode, cfg, k, r.outage_infinite,
                                              spec.seed);
                        }
                        if (has_output("cdf_validation")) {
                            if (mode != Mode::noncoherent)
                                bad("cdf_validation needs mode noncoherent");
                            ChannelSet ch =
                                draw_channels(cfg, mode, spec.seed);
                            NormCdfData d = empirical_norm_cdfs(
                                ch, cfg, scheme, k, 0, spec.n_trials,
                                spec.seed);
                            BlockLinkStats st =
                                link_stats(ch, cfg, scheme, mode, k, 0);
                            GammaMatch gm =
                                gamma_match(st, cfg.coherence, cfg.pilot_len);
                            double t_eff =
                                double(cfg.coherence - cfg.pilot_len);
                            Estimate ks_y{ks_distance_to_gamma(
                                              d.v_y, gm.beta_y,
                                              gm.beta_y / t_eff),
                                          0, spec.n_trials};
                            Estimate ks_n{ks_distance_to_gamma(
                                              d.v_n, gm.beta_n,
                                              gm.beta_n / t_eff),
                                          0, spec.n_trials};
                            Estimate corr{d.corr, 0, spec.n_trials};
                            emit_estimate_row(out, "ks_vy", scheme, mode, cfg,
                                              k, ks_y, spec.seed);
                            emit_estimate_row(out, "ks_vn", scheme, mode, cfg,
                                              k, ks_n, spec.seed);
                            emit_estimate_row(out, "corr_vyvn", scheme, mode,
                                              cfg, k, corr, spec.seed);
                        }
                    }
                }
            }
        }
    }
}

std::string run_sweep_to_string(const SweepSpec& spec) {
    std::ostringstream ss;
    run_sweep(spec, ss);
    return ss.str();
}

}  // namespace fbl
