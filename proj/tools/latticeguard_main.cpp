// latticeguard: nested-lattice coding toolkit and relay simulator.
//
// Subcommands map one-to-one onto the library operations; `run` executes a
// JSON experiment config and persists a manifest plus one report per
// analysis.  Exit codes: 0 success, 1 usage/config error, 2 failed audit.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "latticeguard/construction_a.hpp"
#include "latticeguard/encoding.hpp"
#include "latticeguard/io.hpp"
#include "latticeguard/lattice.hpp"
#include "latticeguard/relay.hpp"
#include "latticeguard/secrecy.hpp"

namespace lg = latticeguard;
using lg::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct FixtureFlags {
    std::int64_t q = 0;
    int n = 0;
    std::string c_rows, c0_rows;
    double scale = 1.0;
    std::string fine, coarse;
};

void add_fixture_flags(CLI::App* cmd, FixtureFlags& fx) {
    cmd->add_option("--q", fx.q, "field size for a Construction-A fixture");
    cmd->add_option("--n", fx.n, "code length for a Construction-A fixture");
    cmd->add_option("--c", fx.c_rows, "generators of C as JSON rows, e.g. [[1,2]]");
    cmd->add_option("--c0", fx.c0_rows, "generators of C0 as JSON rows");
    cmd->add_option("--scale", fx.scale, "Construction-A scale factor");
    cmd->add_option("--fine", fx.fine, "fine lattice spec (z, 5z, z2, {...}, @file)");
    cmd->add_option("--coarse", fx.coarse, "coarse lattice spec");
}

std::vector<lg::FqVec> parse_rows(const std::string& text) {
    if (text.empty()) return {};
    json j = json::parse(text);
    std::vector<lg::FqVec> rows;
    for (const auto& row : j) {
        lg::FqVec g;
        for (const auto& e : row) g.push_back(e.get<std::int64_t>());
        rows.push_back(g);
    }
    return rows;
}

lg::NestedPair pair_from_flags(const FixtureFlags& fx) {
    if (fx.q > 0) {
        lg::LinearCode c = lg::make_linear_code(fx.q, fx.n, parse_rows(fx.c_rows));
        lg::LinearCode c0 = lg::make_linear_code(fx.q, fx.n, parse_rows(fx.c0_rows));
        return lg::nested_pair_from_codes(c0, c, fx.scale).pair;
    }
    if (fx.fine.empty() || fx.coarse.empty())
        throw lg::ConfigError("fixture needs --q/--n/--c/--c0 or --fine/--coarse");
    return lg::make_nested(lg::lattice_from_spec(fx.fine),
                           lg::lattice_from_spec(fx.coarse));
}

void emit(const std::string& out, const std::string& content) {
    if (out.empty())
        std::cout << content << std::endl;
    else
        lg::write_file(out, content);
}

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json attack_records(const lg::Lattice& L, double h1, double h2, int box,
                    int trials, std::uint64_t seed) {
    json records = json::array();
    int unique_count = 0;
    std::mt19937_64 rng(seed);
    const int n = L.dim();
    for (int t = 0; t < trials; ++t) {
        lg::CoeffVec cu(n), cv(n);
        for (int i = 0; i < n; ++i) {
            cu[i] = static_cast<std::int64_t>(rng() % (2 * box + 1)) - box;
            cv[i] = static_cast<std::int64_t>(rng() % (2 * box + 1)) - box;
        }
        lg::Vec w = h1 * L.point_from_coeffs(cu) + h2 * L.point_from_coeffs(cv);
        lg::EavesdropResult res = lg::eavesdrop_irrational(L, h1, h2, w, box);
        bool match = res.unique && res.solutions.size() == 1 &&
                     res.solutions[0].first == cu && res.solutions[0].second == cv;
        if (res.unique) ++unique_count;
        json rec{{"trial", t},
                 {"unique", res.unique},
                 {"solutions", res.solution_count},
                 {"match", match}};
        json ju = json::array(), jv = json::array();
        for (int i = 0; i < n; ++i) {
            ju.push_back(cu[i]);
            jv.push_back(cv[i]);
        }
        rec["u"] = ju;
        rec["v"] = jv;
        records.push_back(rec);
    }
    return json{{"h1", h1},
                {"h2", h2},
                {"box", box},
                {"trials", trials},
                {"unique_recoveries", unique_count},
                {"records", records}};
}

int run_config(const std::string& path, const std::string& out_override) {
    lg::ExperimentConfig cfg = lg::config_from_file(path);
    std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;
    if (out_dir.empty()) throw lg::ConfigError("no output directory (config out_dir or --out)");
    std::filesystem::create_directories(out_dir);
    auto opath = [&](const std::string& f) { return out_dir + "/" + f; };

    std::string hash = lg::hash_hex(cfg.canonical.dump());
    json manifest{{"name", cfg.name},
                  {"config", cfg.canonical},
                  {"config_hash", hash},
                  {"tool_version", kVersion},
                  {"seed", cfg.seed},
                  {"generated_utc", utc_now()}};
    if (!cfg.expect.empty()) manifest["expect"] = cfg.expect;
    lg::write_file(opath("manifest.json"), manifest.dump(2) + "\n");

    lg::NestedPair pair = lg::pair_from_config(cfg);
    auto reduced = lg::reduce_gains(cfg.h1, cfg.h2, 1000000, 1e-9);

    auto integral_gains = [&]() -> std::pair<std::int64_t, std::int64_t> {
        if (!reduced)
            throw lg::ConfigError("audit analyses need gains with a rational ratio");
        return {reduced->k1, reduced->k2};
    };

    bool any_failed = false;
    for (const auto& a : cfg.analyses) {
        if (a.type == "audit-perfect") {
            auto [k1, k2] = integral_gains();
            lg::SecrecyReport rep = lg::perfect_secrecy_audit(
                pair, cfg.density, k1, k2, a.tol, a.tail);
            json j = lg::secrecy_report_to_json(rep);
            j["manifest_hash"] = hash;
            lg::write_file(opath("audit-perfect.json"), j.dump(2) + "\n");
            lg::write_file(opath("audit-perfect-distances.csv"),
                           "# manifest " + hash + "\n" +
                               lg::per_message_csv(rep.per_message));
            if (!rep.passed) any_failed = true;
        } else if (a.type == "audit-strong") {
            auto [k1, k2] = integral_gains();
            lg::SecrecyReport rep = lg::strong_secrecy_audit(
                pair, cfg.density, k1, k2, a.tail > 0 ? a.tail : 1e-9);
            json j = lg::secrecy_report_to_json(rep);
            j["manifest_hash"] = hash;
            lg::write_file(opath("audit-strong.json"), j.dump(2) + "\n");
            lg::write_file(opath("audit-strong-distances.csv"),
                           "# manifest " + hash + "\n" +
                               lg::per_message_csv(rep.per_message));
            if (!rep.passed) any_failed = true;
        } else if (a.type == "simulate") {
            if (!reduced) {
                // Irreducible gains: fall back to the eavesdropper demo.
                json j = attack_records(pair.fine(), cfg.h1, cfg.h2, 10, 100,
                                        cfg.seed);
                j["note"] = "gains are irreducible; MAC simulation replaced by the attack demo";
                j["manifest_hash"] = hash;
                lg::write_file(opath("attack-fallback.json"), j.dump(2) + "\n");
                continue;
            }
            std::vector<lg::MacReport> rows;
            for (std::size_t i = 0; i < cfg.noise_grid.size(); ++i) {
                lg::ChannelModel ch = lg::make_channel(cfg.h1, cfg.h2,
                                                       cfg.noise_grid[i]);
                rows.push_back(lg::simulate_mac(pair, cfg.density, ch,
                                                cfg.trials,
                                                lg::mix_seed(cfg.seed, i),
                                                a.tail > 0 ? a.tail : 1e-6));
            }
            lg::write_file(opath("simulate.csv"),
                           "# manifest " + hash + "\n" + lg::sweep_csv(rows));
        } else if (a.type == "flatness") {
            double ff = lg::flatness_factor(pair.coarse(), a.theta,
                                            lg::FlatnessMethod::FourierSum);
            json j{{"theta", a.theta}, {"flatness", ff}, {"manifest_hash", hash}};
            lg::write_file(opath("flatness.json"), j.dump(2) + "\n");
        } else if (a.type == "attack") {
            json j = attack_records(pair.fine(), cfg.h1, cfg.h2, a.box,
                                    a.attack_trials, cfg.seed);
            j["manifest_hash"] = hash;
            lg::write_file(opath("attack.json"), j.dump(2) + "\n");
        } else if (a.type == "rates") {
            lg::RateResult r;
            if (a.mode == "perfect")
                r = lg::rate_perfect(a.alpha, a.snr, 1.0);
            else if (a.mode == "strong")
                r = lg::rate_strong(a.alpha, a.snr, 1.0);
            else
                throw lg::ConfigError("rates analysis supports perfect or strong");
            json j{{"mode", a.mode},       {"alpha", a.alpha},
                   {"snr", a.snr},         {"bits", r.bits},
                   {"infeasible", r.infeasible}, {"manifest_hash", hash}};
            lg::write_file(opath("rates.json"), j.dump(2) + "\n");
        }
    }
    return any_failed ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nested-lattice relaying toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- build-lattice ----
    auto* cmd_build = app.add_subcommand("build-lattice",
                                         "derive lattice data from a code or generator");
    std::string bl_code, bl_lattice, bl_coarse, bl_out, bl_format = "json";
    double bl_scale = 1.0;
    cmd_build->add_option("--code", bl_code, "linear code JSON {\"q\",\"n\",\"generators\"}");
    cmd_build->add_option("--lattice", bl_lattice, "lattice spec (z, 5z, z2, {...}, @file)");
    cmd_build->add_option("--coarse", bl_coarse, "optional coarse lattice spec for nesting info");
    cmd_build->add_option("--scale", bl_scale, "Construction-A scale");
    cmd_build->add_option("--out", bl_out, "output file (stdout if omitted)");
    cmd_build->add_option("--format", bl_format, "json")->check(CLI::IsMember({"json", "csv"}));
    std::uint64_t bl_seed = 0;
    cmd_build->add_option("--seed", bl_seed, "unused; accepted for uniformity");

    // ---- flatness ----
    auto* cmd_flat = app.add_subcommand("flatness", "flatness factor of a lattice");
    std::string fl_lattice = "z", fl_method = "fourier", fl_out, fl_format = "json";
    double fl_theta = 1.0;
    std::uint64_t fl_seed = 0;
    cmd_flat->add_option("--lattice", fl_lattice, "lattice spec");
    cmd_flat->add_option("--theta", fl_theta, "Gaussian width")->required();
    cmd_flat->add_option("--method", fl_method, "fourier | grid | both")
        ->check(CLI::IsMember({"fourier", "grid", "both"}));
    cmd_flat->add_option("--out", fl_out, "output file");
    cmd_flat->add_option("--format", fl_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    cmd_flat->add_option("--seed", fl_seed, "unused; accepted for uniformity");

    // ---- audit-perfect ----
    auto* cmd_ap = app.add_subcommand("audit-perfect",
                                      "perfect-secrecy audit (Fejer encoder)");
    FixtureFlags ap_fx;
    add_fixture_flags(cmd_ap, ap_fx);
    double ap_r = 0.4, ap_tol = 1e-4, ap_tail = 0.0;
    std::int64_t ap_h1 = 1, ap_h2 = 2;
    std::string ap_out, ap_format = "json";
    std::uint64_t ap_seed = 0;
    cmd_ap->add_option("--r", ap_r, "Fejer half-width");
    cmd_ap->add_option("--h1", ap_h1, "integer gain h1");
    cmd_ap->add_option("--h2", ap_h2, "integer gain h2");
    cmd_ap->add_option("--tol", ap_tol, "variational-distance tolerance");
    cmd_ap->add_option("--tail", ap_tail, "pmf tail target override");
    cmd_ap->add_option("--out", ap_out, "output file");
    cmd_ap->add_option("--format", ap_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    cmd_ap->add_option("--seed", ap_seed, "unused; accepted for uniformity");

    // ---- audit-strong ----
    auto* cmd_as = app.add_subcommand("audit-strong",
                                      "strong-secrecy audit (Gaussian encoder)");
    FixtureFlags as_fx;
    add_fixture_flags(cmd_as, as_fx);
    double as_power = 125.0, as_tail = 1e-9;
    std::int64_t as_h1 = 1, as_h2 = 2;
    std::string as_out, as_format = "json";
    std::uint64_t as_seed = 0;
    cmd_as->add_option("--power", as_power, "per-coordinate power P (sigma = sqrt(P))");
    cmd_as->add_option("--h1", as_h1, "integer gain h1");
    cmd_as->add_option("--h2", as_h2, "integer gain h2");
    cmd_as->add_option("--tail", as_tail, "pmf tail target");
    cmd_as->add_option("--out", as_out, "output file");
    cmd_as->add_option("--format", as_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    cmd_as->add_option("--seed", as_seed, "unused; accepted for uniformity");

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand("simulate", "MAC-phase Monte Carlo");
    FixtureFlags sim_fx;
    add_fixture_flags(cmd_sim, sim_fx);
    std::string sim_density = "gaussian", sim_h1 = "1", sim_h2 = "2";
    double sim_sigma = 11.180339887498949, sim_r = 0.4, sim_tail = 1e-6;
    std::string sim_noise = "0";
    std::int64_t sim_trials = 10000;
    std::uint64_t sim_seed = 1;
    std::string sim_out, sim_format = "csv";
    cmd_sim->add_option("--density", sim_density, "gaussian | fejer")
        ->check(CLI::IsMember({"gaussian", "fejer"}));
    cmd_sim->add_option("--sigma", sim_sigma, "Gaussian sigma");
    cmd_sim->add_option("--r", sim_r, "Fejer half-width");
    cmd_sim->add_option("--h1", sim_h1, "gain h1 (number or sqrt2/sqrt3/pi)");
    cmd_sim->add_option("--h2", sim_h2, "gain h2");
    cmd_sim->add_option("--noise", sim_noise, "comma-separated noise variances");
    cmd_sim->add_option("--trials", sim_trials, "trials per noise point");
    cmd_sim->add_option("--seed", sim_seed, "root seed");
    cmd_sim->add_option("--tail", sim_tail, "pmf tail target");
    cmd_sim->add_option("--out", sim_out, "output file");
    cmd_sim->add_option("--format", sim_format, "csv | json")->check(CLI::IsMember({"json", "csv"}));

    // ---- attack ----
    auto* cmd_atk = app.add_subcommand("attack", "irrational-gain eavesdropper demo");
    std::string atk_lattice = "z2", atk_h1 = "1", atk_h2 = "sqrt2";
    int atk_box = 10, atk_trials = 100;
    std::uint64_t atk_seed = 7;
    std::string atk_out, atk_format = "json";
    cmd_atk->add_option("--lattice", atk_lattice, "lattice spec");
    cmd_atk->add_option("--h1", atk_h1, "gain h1 (number or sqrt2/sqrt3/pi)");
    cmd_atk->add_option("--h2", atk_h2, "gain h2");
    cmd_atk->add_option("--box", atk_box, "coefficient box half-width");
    cmd_atk->add_option("--trials", atk_trials, "number of random message pairs");
    cmd_atk->add_option("--seed", atk_seed, "root seed");
    cmd_atk->add_option("--out", atk_out, "output file");
    cmd_atk->add_option("--format", atk_format, "json")->check(CLI::IsMember({"json", "csv"}));

    // ---- rates ----
    auto* cmd_rates = app.add_subcommand("rates", "achievable-rate calculators");
    std::string rt_mode = "perfect";
    double rt_alpha = 0.9, rt_snr = 100.0, rt_power = 100.0, rt_nsvar = 1.0;
    double rt_h1 = 1.0, rt_h2 = 1.0, rt_delta = 0.0, rt_nsvar1 = 1.0;
    std::int64_t rt_k1 = 0, rt_k2 = 0;
    std::string rt_out, rt_format = "json";
    std::uint64_t rt_seed = 0;
    cmd_rates->add_option("--mode", rt_mode, "perfect | strong | jamming")
        ->check(CLI::IsMember({"perfect", "strong", "jamming"}));
    cmd_rates->add_option("--alpha", rt_alpha, "support-radius fraction alpha");
    cmd_rates->add_option("--snr", rt_snr, "P / noise_var (perfect/strong)");
    cmd_rates->add_option("--power", rt_power, "transmit power (jamming)");
    cmd_rates->add_option("--noise-var", rt_nsvar, "noise variance");
    cmd_rates->add_option("--noise1-var", rt_nsvar1, "first-phase noise variance (jamming)");
    cmd_rates->add_option("--h1", rt_h1, "gain h1 (jamming)");
    cmd_rates->add_option("--h2", rt_h2, "gain h2 (jamming)");
    cmd_rates->add_option("--delta", rt_delta, "gain-estimation error bound (jamming)");
    cmd_rates->add_option("--k1", rt_k1, "optional integer gain for feasibility");
    cmd_rates->add_option("--k2", rt_k2, "optional integer gain for feasibility");
    cmd_rates->add_option("--out", rt_out, "output file");
    cmd_rates->add_option("--format", rt_format, "json")->check(CLI::IsMember({"json", "csv"}));
    cmd_rates->add_option("--seed", rt_seed, "unused; accepted for uniformity");

    // ---- run ----
    auto* cmd_run = app.add_subcommand("run", "execute a JSON experiment config");
    std::string run_config_path, run_out;
    cmd_run->add_option("--config", run_config_path, "config path")->required();
    cmd_run->add_option("--out", run_out, "output directory override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_build->parsed()) {
            lg::Lattice L = !bl_code.empty()
                                ? lg::construction_a(lg::code_from_json(json::parse(bl_code)), bl_scale)
                                : lg::lattice_from_spec(bl_lattice);
            json j{{"lattice", lg::lattice_to_json(L)},
                   {"cell_volume", L.cell_volume()},
                   {"packing_radius", lg::packing_radius(L)},
                   {"dual", lg::lattice_to_json(lg::fourier_dual(L))}};
            if (!bl_coarse.empty()) {
                lg::NestedPair pair = lg::make_nested(L, lg::lattice_from_spec(bl_coarse));
                j["index"] = pair.index();
                json reps = json::array();
                for (const auto& rep : pair.reps()) {
                    json r = json::array();
                    for (int i = 0; i < L.dim(); ++i) r.push_back(rep.point[i]);
                    reps.push_back(r);
                }
                j["representatives"] = reps;
            }
            emit(bl_out, j.dump(2));
        } else if (cmd_flat->parsed()) {
            lg::Lattice L = lg::lattice_from_spec(fl_lattice);
            json j{{"theta", fl_theta}};
            if (fl_method == "fourier" || fl_method == "both")
                j["fourier"] = lg::flatness_factor(L, fl_theta, lg::FlatnessMethod::FourierSum);
            if (fl_method == "grid" || fl_method == "both")
                j["grid"] = lg::flatness_factor(L, fl_theta, lg::FlatnessMethod::PrimalGrid);
            if (fl_out.empty()) {
                double v = j.contains("fourier") ? j["fourier"].get<double>()
                                                 : j["grid"].get<double>();
                std::cout << lg::format_double(v) << std::endl;
            } else {
                emit(fl_out, j.dump(2));
            }
        } else if (cmd_ap->parsed()) {
            lg::NestedPair pair = pair_from_flags(ap_fx);
            lg::SecrecyReport rep = lg::perfect_secrecy_audit(
                pair, lg::Density::fejer(ap_r), ap_h1, ap_h2, ap_tol, ap_tail);
            emit(ap_out, ap_format == "csv" ? lg::per_message_csv(rep.per_message)
                                            : lg::secrecy_report_to_json(rep).dump(2));
            return rep.passed ? 0 : 2;
        } else if (cmd_as->parsed()) {
            lg::NestedPair pair = pair_from_flags(as_fx);
            lg::SecrecyReport rep = lg::strong_secrecy_audit(
                pair, lg::Density::gaussian(std::sqrt(as_power)), as_h1, as_h2,
                as_tail);
            emit(as_out, as_format == "csv" ? lg::per_message_csv(rep.per_message)
                                            : lg::secrecy_report_to_json(rep).dump(2));
            return rep.passed ? 0 : 2;
        } else if (cmd_sim->parsed()) {
            lg::NestedPair pair = pair_from_flags(sim_fx);
            lg::Density d = (sim_density == "gaussian")
                                ? lg::Density::gaussian(sim_sigma)
                                : lg::Density::fejer(sim_r);
            double h1 = lg::gain_from_string(sim_h1);
            double h2 = lg::gain_from_string(sim_h2);
            std::vector<double> grid;
            std::stringstream ss(sim_noise);
            std::string tok;
            while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
            std::vector<lg::MacReport> rows;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                lg::ChannelModel ch = lg::make_channel(h1, h2, grid[i]);
                rows.push_back(lg::simulate_mac(pair, d, ch, sim_trials,
                                                lg::mix_seed(sim_seed, i),
                                                sim_tail));
            }
            if (sim_format == "json") {
                json j = json::array();
                for (const auto& r : rows) j.push_back(lg::mac_report_to_json(r));
                emit(sim_out, j.dump(2));
            } else {
                emit(sim_out, lg::sweep_csv(rows));
            }
        } else if (cmd_atk->parsed()) {
            lg::Lattice L = lg::lattice_from_spec(atk_lattice);
            json j = attack_records(L, lg::gain_from_string(atk_h1),
                                    lg::gain_from_string(atk_h2), atk_box,
                                    atk_trials, atk_seed);
            emit(atk_out, j.dump(2));
        } else if (cmd_rates->parsed()) {
            lg::RateResult r;
            if (rt_mode == "perfect")
                r = lg::rate_perfect(rt_alpha, rt_snr, 1.0);
            else if (rt_mode == "strong")
                r = lg::rate_strong(rt_alpha, rt_snr, 1.0);
            else
                r = lg::rate_jamming(rt_h1, rt_h2, rt_power, rt_delta, rt_nsvar,
                                     rt_nsvar1);
            json j{{"mode", rt_mode}, {"bits", r.bits}, {"infeasible", r.infeasible}};
            if (rt_k1 != 0 && rt_k2 != 0) {
                j["feasible_perfect"] =
                    lg::feasibility(rt_alpha, rt_k1, rt_k2, lg::SecrecyMode::Perfect);
                j["feasible_strong"] =
                    lg::feasibility(rt_alpha, rt_k1, rt_k2, lg::SecrecyMode::Strong);
            }
            if (rt_out.empty())
                std::cout << lg::format_double(r.bits) << std::endl;
            else
                emit(rt_out, j.dump(2));
        } else if (cmd_run->parsed()) {
            return run_config(run_config_path, run_out);
        }
    } catch (const lg::ConfigError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const lg::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
