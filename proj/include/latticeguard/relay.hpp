#ifndef LATTICEGUARD_RELAY_HPP
#define LATTICEGUARD_RELAY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "latticeguard/encoding.hpp"
#include "latticeguard/lattice.hpp"

namespace latticeguard {

struct ReducedGains {
    double h = 1.0;
    std::int64_t k1 = 0;
    std::int64_t k2 = 0;
};

// Continued-fraction reduction h1 = h k1, h2 = h k2 with co-prime integers
// and the smallest denominator satisfying the tolerance; nullopt when no
// convergent with |k2| <= max_den is within tol of the ratio.
std::optional<ReducedGains> reduce_gains(double h1, double h2,
                                         std::int64_t max_den, double tol);

struct ChannelModel {
    double h1 = 1.0;
    double h2 = 1.0;
    double noise_var = 0.0;
    std::optional<ReducedGains> reduced;
};

ChannelModel make_channel(double h1, double h2, double noise_var,
                          std::int64_t max_den = 1000000, double tol = 1e-9);

struct TrialRecord {
    std::uint64_t seed = 0;
    std::int64_t trial = 0;
    int x = 0, y = 0;
    Vec u, v, w;
    int decoded = 0;
    int expected = 0;
    bool correct = false;
};

struct MacReport {
    std::int64_t trials = 0;
    std::int64_t errors = 0;
    double error_rate = 0.0;
    double ci_low = 0.0;  // Wilson 95%
    double ci_high = 0.0;
    bool order_condition_ok = false;
    double noise_var = 0.0;
};

// One MAC-phase trial with a per-trial RNG stream derived from (seed, trial).
TrialRecord simulate_one(const NestedPair& pair,
                         const std::vector<CosetPMF>& message_pmfs,
                         const ChannelModel& ch, std::uint64_t seed,
                         std::int64_t trial);

// Monte Carlo of the MAC phase: draws uniform messages, samples the coset
// encoders, decodes closest_point(w / h) in the fine lattice and compares
// the label against k1 x (+) k2 y.  Trials are split across threads (capped
// by LATTICEGUARD_THREADS) with counter-derived streams, so parallel and
// serial runs agree.
MacReport simulate_mac(const NestedPair& pair, const Density& d,
                       const ChannelModel& ch, std::int64_t trials,
                       std::uint64_t seed, double pmf_tail = 1e-6);

struct EavesdropResult {
    bool unique = false;
    // coefficient pairs (u, v) found in the box; capped at 16 entries
    std::vector<std::pair<CoeffVec, CoeffVec>> solutions;
    std::int64_t solution_count = 0;
};

// Enumerates all (u, v) in the coefficient box with ||h1 u + h2 v - w|| <= 1e-6.
EavesdropResult eavesdrop_irrational(const Lattice& L, double h1, double h2,
                                     const Vec& w, int box);

struct RateResult {
    double bits = 0.0;
    bool infeasible = false; // negative value: formula reported as-is
};

RateResult rate_perfect(double alpha, double power, double noise_var);
RateResult rate_strong(double alpha, double power, double noise_var);
RateResult rate_jamming(double h1, double h2, double power, double delta,
                        double noise_var, double noise_var1);

enum class SecrecyMode { Perfect, Strong };

// Perfect: 2/(|k1|+|k2|) > alpha.  Strong: 1/(k1^2+k2^2) >= alpha^2.
bool feasibility(double alpha, std::int64_t k1, std::int64_t k2,
                 SecrecyMode mode);

// Wilson 95% interval for a binomial proportion.
void wilson_interval(std::int64_t errors, std::int64_t trials, double& lo,
                     double& hi);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace latticeguard

#endif
