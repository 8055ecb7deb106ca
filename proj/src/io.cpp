#include "latticeguard/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace latticeguard {

namespace {

double entry_from_json(const json& e) {
    if (e.is_number()) return e.get<double>();
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        double den = e[1].get<double>();
        if (den == 0) throw ConfigError("rational entry has zero denominator");
        return e[0].get<double>() / den;
    }
    throw ConfigError("matrix entries must be numbers or [num, den] pairs");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
}

int line_of_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(const std::string& s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s)));
    return buf;
}

Lattice lattice_from_json(const json& j) {
    if (!j.is_object() || !j.contains("generator"))
        throw ConfigError("lattice description requires a \"generator\" key");
    reject_unknown(j, {"generator", "scale"}, "lattice description");
    const json& g = j["generator"];
    if (!g.is_array() || g.empty())
        throw ConfigError("generator must be a nonempty array of rows");
    int n = static_cast<int>(g.size());
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        if (!g[i].is_array() || static_cast<int>(g[i].size()) != n)
            throw ConfigError("generator must be square");
        for (int k = 0; k < n; ++k) m(i, k) = entry_from_json(g[i][k]);
    }
    double scale = j.value("scale", 1.0);
    return make_lattice(m * scale);
}

json lattice_to_json(const Lattice& L) {
    json rows = json::array();
    for (int i = 0; i < L.dim(); ++i) {
        json row = json::array();
        for (int k = 0; k < L.dim(); ++k) row.push_back(L.generator()(i, k));
        rows.push_back(row);
    }
    return json{{"generator", rows}, {"scale", 1.0}};
}

Lattice lattice_from_spec(const std::string& spec) {
    if (spec.empty()) throw ConfigError("empty lattice spec");
    if (spec.front() == '{') return lattice_from_json(json::parse(spec));
    if (spec.front() == '@') return lattice_from_json(json::parse(read_file(spec.substr(1))));
    // [scale] z [dim]
    std::size_t zpos = spec.find_first_of("zZ");
    if (zpos == std::string::npos)
        throw ConfigError("lattice spec must contain 'z' (e.g. \"z\", \"5z\", \"z2\")");
    double scale = 1.0;
    if (zpos > 0) scale = std::stod(spec.substr(0, zpos));
    int n = 1;
    if (zpos + 1 < spec.size()) n = std::stoi(spec.substr(zpos + 1));
    if (n < 1 || n > Lattice::kMaxExactDim)
        throw ConfigError("lattice dimension out of range");
    return make_lattice(Mat::Identity(n, n) * scale);
}

LinearCode code_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("code description must be an object");
    reject_unknown(j, {"q", "n", "generators"}, "code description");
    if (!j.contains("q") || !j.contains("n"))
        throw ConfigError("code description requires q and n");
    std::int64_t q = j["q"].get<std::int64_t>();
    int n = j["n"].get<int>();
    std::vector<FqVec> gens;
    if (j.contains("generators")) {
        for (const auto& row : j["generators"]) {
            FqVec g;
            for (const auto& e : row) g.push_back(e.get<std::int64_t>());
            gens.push_back(g);
        }
    }
    return make_linear_code(q, n, gens);
}

json code_to_json(const LinearCode& c) {
    json gens = json::array();
    for (const auto& g : c.generators) gens.push_back(g);
    return json{{"q", c.q}, {"n", c.n}, {"generators", gens}};
}

Density density_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("density description requires a \"kind\" key");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "gaussian") {
        reject_unknown(j, {"kind", "sigma"}, "density description");
        if (!j.contains("sigma")) throw ConfigError("gaussian density requires sigma");
        return Density::gaussian(j["sigma"].get<double>());
    }
    if (kind == "fejer") {
        reject_unknown(j, {"kind", "r"}, "density description");
        if (!j.contains("r")) throw ConfigError("fejer density requires r");
        return Density::fejer(j["r"].get<double>());
    }
    throw ConfigError("density kind must be \"gaussian\" or \"fejer\"");
}

json density_to_json(const Density& d) {
    if (d.kind == Density::Kind::Gaussian)
        return json{{"kind", "gaussian"}, {"sigma", d.sigma}};
    return json{{"kind", "fejer"}, {"r", d.r}};
}

double gain_from_string(const std::string& s) {
    if (s == "sqrt2") return std::sqrt(2.0);
    if (s == "sqrt3") return std::sqrt(3.0);
    if (s == "pi") return M_PI;
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (...) {
    }
    throw ConfigError("gain must be numeric or one of sqrt2, sqrt3, pi");
}

double gain_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return gain_from_string(j.get<std::string>());
    throw ConfigError("gain must be numeric or one of sqrt2, sqrt3, pi");
}

json secrecy_report_to_json(const SecrecyReport& r) {
    json per = json::array();
    for (std::size_t i = 0; i < r.per_message.size(); ++i)
        per.push_back(json{{"message", i},
                           {"distance", r.per_message[i].value},
                           {"error", r.per_message[i].error}});
    json j{{"mode", r.mode},
           {"dimension", r.dimension},
           {"group_size", r.group_size},
           {"h1", r.h1},
           {"h2", r.h2},
           {"condition_holds", r.condition_holds},
           {"geometric_certificate", r.geometric_certificate},
           {"max_variational", {{"value", r.max_variational.value},
                                {"error", r.max_variational.error}}},
           {"per_message", per},
           {"leakage_bits", {{"value", r.leakage_bits.value},
                             {"error", r.leakage_bits.error}}},
           {"accumulated_tail", r.accumulated_tail},
           {"tolerance", r.tolerance},
           {"numerics_agree", r.numerics_agree},
           {"passed", r.passed}};
    if (std::isfinite(r.epsilon)) j["epsilon"] = r.epsilon;
    if (std::isfinite(r.bound_bits)) j["bound_bits"] = r.bound_bits;
    return j;
}

json mac_report_to_json(const MacReport& r) {
    return json{{"noise_var", r.noise_var}, {"trials", r.trials},
                {"errors", r.errors},       {"rate", r.error_rate},
                {"ci_low", r.ci_low},       {"ci_high", r.ci_high},
                {"order_condition_ok", r.order_condition_ok}};
}

std::string pmf_to_csv(const CosetPMF& pmf) {
    std::ostringstream out;
    const int n = static_cast<int>(pmf.points.cols());
    for (int j = 0; j < n; ++j) out << "p" << j << ",";
    out << "probability\n";
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        for (int j = 0; j < n; ++j) out << format_double(pmf.points(i, j)) << ",";
        out << format_double(pmf.probs[i]) << "\n";
    }
    return out.str();
}

std::string per_message_csv(const std::vector<ValueErr>& rows) {
    std::ostringstream out;
    out << "message,distance,error\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        out << i << "," << format_double(rows[i].value) << ","
            << format_double(rows[i].error) << "\n";
    return out.str();
}

std::string sweep_csv(const std::vector<MacReport>& rows) {
    std::ostringstream out;
    out << "noise_var,trials,errors,rate,ci_low,ci_high\n";
    for (const auto& r : rows)
        out << format_double(r.noise_var) << "," << r.trials << "," << r.errors
            << "," << format_double(r.error_rate) << ","
            << format_double(r.ci_low) << "," << format_double(r.ci_high)
            << "\n";
    return out.str();
}

ExperimentConfig config_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error at line " +
                          std::to_string(line_of_offset(text, e.byte)) + ": " +
                          e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"name", "fixture", "density", "gains", "noise_grid",
                    "trials", "seed", "out_dir", "analyses", "expect"},
                   "config");

    ExperimentConfig cfg;
    if (!j.contains("name")) throw ConfigError("config requires \"name\"");
    cfg.name = j["name"].get<std::string>();

    if (!j.contains("fixture")) throw ConfigError("config requires \"fixture\"");
    const json& fx = j["fixture"];
    if (fx.contains("codes")) {
        reject_unknown(fx, {"codes", "scale"}, "fixture");
        const json& codes = fx["codes"];
        reject_unknown(codes, {"q", "n", "c", "c0"}, "fixture.codes");
        cfg.fixture_from_codes = true;
        cfg.q = codes.at("q").get<std::int64_t>();
        cfg.n = codes.at("n").get<int>();
        auto read_rows = [&](const char* key, std::vector<FqVec>& out) {
            if (!codes.contains(key)) return;
            for (const auto& row : codes[key]) {
                FqVec g;
                for (const auto& e : row) g.push_back(e.get<std::int64_t>());
                out.push_back(g);
            }
        };
        read_rows("c", cfg.c_gens);
        read_rows("c0", cfg.c0_gens);
        cfg.scale = fx.value("scale", 1.0);
    } else if (fx.contains("fine")) {
        reject_unknown(fx, {"fine", "coarse"}, "fixture");
        if (!fx.contains("coarse"))
            throw ConfigError("explicit-lattice fixture requires \"coarse\"");
        cfg.fixture_from_codes = false;
        cfg.fine_lattice = fx["fine"];
        cfg.coarse_lattice = fx["coarse"];
        lattice_from_json(cfg.fine_lattice);   // validate early
        lattice_from_json(cfg.coarse_lattice);
    } else {
        throw ConfigError("fixture requires either \"codes\" or \"fine\"/\"coarse\"");
    }

    if (!j.contains("density")) throw ConfigError("config requires \"density\"");
    cfg.density = density_from_json(j["density"]);

    if (!j.contains("gains")) throw ConfigError("config requires \"gains\"");
    reject_unknown(j["gains"], {"h1", "h2"}, "gains");
    cfg.h1 = gain_from_json(j["gains"].at("h1"));
    cfg.h2 = gain_from_json(j["gains"].at("h2"));

    if (j.contains("noise_grid")) {
        cfg.noise_grid.clear();
        for (const auto& e : j["noise_grid"]) cfg.noise_grid.push_back(e.get<double>());
        if (cfg.noise_grid.empty()) throw ConfigError("noise_grid must be nonempty");
    }
    cfg.trials = j.value("trials", std::int64_t(10000));
    cfg.seed = j.value("seed", std::uint64_t(1));
    cfg.out_dir = j.value("out_dir", std::string());
    cfg.expect = j.value("expect", std::string());
    if (!cfg.expect.empty() && cfg.expect != "pass" && cfg.expect != "fail")
        throw ConfigError("expect must be \"pass\" or \"fail\"");

    if (!j.contains("analyses") || !j["analyses"].is_array() || j["analyses"].empty())
        throw ConfigError("config requires a nonempty \"analyses\" array");
    for (const auto& a : j["analyses"]) {
        if (!a.is_object() || !a.contains("type"))
            throw ConfigError("each analysis requires a \"type\"");
        AnalysisSpec spec;
        spec.type = a["type"].get<std::string>();
        if (spec.type == "audit-perfect") {
            reject_unknown(a, {"type", "tol", "tail"}, "analysis audit-perfect");
            spec.tol = a.value("tol", 1e-4);
            spec.tail = a.value("tail", 0.0);
        } else if (spec.type == "audit-strong") {
            reject_unknown(a, {"type", "tail"}, "analysis audit-strong");
            spec.tail = a.value("tail", 1e-9);
        } else if (spec.type == "simulate") {
            reject_unknown(a, {"type", "tail"}, "analysis simulate");
            spec.tail = a.value("tail", 1e-6);
        } else if (spec.type == "flatness") {
            reject_unknown(a, {"type", "theta"}, "analysis flatness");
            spec.theta = a.value("theta", 1.0);
        } else if (spec.type == "attack") {
            reject_unknown(a, {"type", "box", "trials"}, "analysis attack");
            spec.box = a.value("box", 10);
            spec.attack_trials = a.value("trials", 100);
        } else if (spec.type == "rates") {
            reject_unknown(a, {"type", "mode", "alpha", "snr"}, "analysis rates");
            spec.mode = a.value("mode", std::string("perfect"));
            spec.alpha = a.value("alpha", 0.9);
            spec.snr = a.value("snr", 100.0);
        } else {
            throw ConfigError("unknown analysis type \"" + spec.type + "\"");
        }
        cfg.analyses.push_back(spec);
    }

    cfg.canonical = j; // nlohmann objects are key-sorted, so dumps are canonical
    return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
    return config_from_string(read_file(path));
}

NestedPair pair_from_config(const ExperimentConfig& cfg) {
    if (cfg.fixture_from_codes) {
        LinearCode c = make_linear_code(cfg.q, cfg.n, cfg.c_gens);
        LinearCode c0 = make_linear_code(cfg.q, cfg.n, cfg.c0_gens);
        return nested_pair_from_codes(c0, c, cfg.scale).pair;
    }
    return make_nested(lattice_from_json(cfg.fine_lattice),
                       lattice_from_json(cfg.coarse_lattice));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

} // namespace latticeguard
