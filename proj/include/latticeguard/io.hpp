#ifndef LATTICEGUARD_IO_HPP
#define LATTICEGUARD_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latticeguard/construction_a.hpp"
#include "latticeguard/encoding.hpp"
#include "latticeguard/lattice.hpp"
#include "latticeguard/secrecy.hpp"
#include "latticeguard/relay.hpp"

namespace latticeguard {

using json = nlohmann::json;

// {"generator": [[...]], "scale": s}; entries are numbers or exact
// rationals written as [num, den].
Lattice lattice_from_json(const json& j);
json lattice_to_json(const Lattice& L);

// Shorthand accepted on the command line: "[scale]z[dim]" such as "z",
// "5z", "z2", "0.5z3"; inline JSON ("{...}") and "@path" also work.
Lattice lattice_from_spec(const std::string& spec);

// {"q": 5, "n": 2, "generators": [[1,2]]}
LinearCode code_from_json(const json& j);
json code_to_json(const LinearCode& c);

// {"kind":"gaussian","sigma":...} or {"kind":"fejer","r":...}
Density density_from_json(const json& j);
json density_to_json(const Density& d);

// numeric literal or one of the symbolic tokens sqrt2, sqrt3, pi
double gain_from_json(const json& j);
double gain_from_string(const std::string& s);

json secrecy_report_to_json(const SecrecyReport& r);
json mac_report_to_json(const MacReport& r);

std::string pmf_to_csv(const CosetPMF& pmf);
std::string per_message_csv(const std::vector<ValueErr>& rows);
std::string sweep_csv(const std::vector<MacReport>& rows);

std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(const std::string& s);

struct AnalysisSpec {
    std::string type;                 // audit-perfect | audit-strong | simulate | flatness | attack | rates
    double tol = 1e-4;                // audit-perfect
    double tail = 0.0;                // pmf tail override (0 = default)
    double theta = 1.0;               // flatness
    int box = 10;                     // attack
    int attack_trials = 100;          // attack
    std::string mode = "perfect";     // rates
    double alpha = 0.9, snr = 100.0;  // rates
};

struct ExperimentConfig {
    std::string name;
    bool fixture_from_codes = true;
    std::int64_t q = 0;
    int n = 0;
    std::vector<FqVec> c_gens, c0_gens;
    double scale = 1.0;
    json fine_lattice, coarse_lattice; // explicit-lattice fixtures
    Density density = Density::gaussian(1.0);
    double h1 = 1.0, h2 = 1.0;
    std::vector<double> noise_grid{0.0};
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::vector<AnalysisSpec> analyses;
    std::string expect; // optional "pass" / "fail" annotation
    json canonical;     // resolved config, hashed into the manifest
};

// Strict parse: unknown keys anywhere are rejected; parse errors carry
// line numbers.
ExperimentConfig config_from_string(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);

NestedPair pair_from_config(const ExperimentConfig& cfg);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace latticeguard

#endif
