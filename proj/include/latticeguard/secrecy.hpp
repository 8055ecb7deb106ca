#ifndef LATTICEGUARD_SECRECY_HPP
#define LATTICEGUARD_SECRECY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latticeguard/encoding.hpp"
#include "latticeguard/lattice.hpp"

namespace latticeguard {

enum class FlatnessMethod { FourierSum, PrimalGrid };

// Flatness factor eps_L(theta) = max over V(L) of |vol(V(L)) g_{x,theta}(L) - 1|.
// FourierSum evaluates the exact dual form sum_{0 != lam in dual(L)}
// exp(-theta^2 ||lam||^2 / 2) with a certified remainder <= 1e-15; PrimalGrid
// scans a fundamental-domain grid of >= 10^3 points per dimension.
double flatness_factor(const Lattice& L, double theta, FlatnessMethod method);

struct ValueErr {
    double value = 0.0;
    double error = 0.0;
};

// Probability mass on the integer-coefficient grid of a base lattice,
// carrying a certified L1 error bound against the exact distribution.
class MassFunction {
public:
    using Key = std::vector<std::int64_t>;

    explicit MassFunction(Lattice base) : base_(std::move(base)) {}

    const Lattice& base() const { return base_; }
    std::map<Key, double>& entries() { return entries_; }
    const std::map<Key, double>& entries() const { return entries_; }
    double l1_error() const { return l1_error_; }
    void set_l1_error(double e) { l1_error_ = e; }

    void add(const Key& k, double p);
    double total() const;
    Vec point_of(const Key& k) const;

private:
    Lattice base_;
    std::map<Key, double> entries_;
    double l1_error_ = 0.0;
};

MassFunction convolve(const MassFunction& a, const MassFunction& b,
                      double op_budget = 2e8);
MassFunction mix(const std::vector<const MassFunction*>& parts,
                 const std::vector<double>& weights);

// Distribution of W = h1 U + h2 V on the fine lattice, optionally conditioned
// on the first and/or both messages (uniform marginalisation otherwise).
MassFunction w_distribution(const NestedPair& pair, const Density& d,
                            std::int64_t h1, std::int64_t h2,
                            std::optional<int> x, std::optional<int> y,
                            double tail);

ValueErr variational_distance(const MassFunction& p, const MassFunction& q);

// Plug-in mutual information (bits) for a prior over messages and the
// conditional laws of the observation.
ValueErr mutual_information(const std::vector<double>& prior,
                            const std::vector<MassFunction>& conditionals);

// RHS of the strong-secrecy theorem: (16 eps / 3)(log2 M - log2(16 eps / 3)).
// Requires eps < 1/(16 e) and M > 4.
double strong_secrecy_bound(double eps, std::int64_t M);

struct SecrecyReport {
    std::string mode;          // "perfect" or "strong"
    int dimension = 0;
    std::int64_t group_size = 0;
    std::int64_t h1 = 0, h2 = 0;
    bool condition_holds = false;      // no nonzero order divides h1 or h2
    bool geometric_certificate = false;
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    ValueErr max_variational;
    std::vector<ValueErr> per_message;
    ValueErr leakage_bits;
    double bound_bits = std::numeric_limits<double>::quiet_NaN();
    double accumulated_tail = 0.0;
    double tolerance = 0.0;
    bool numerics_agree = true;
    bool passed = false;
};

// Exact check that the support cube of psi, scaled by (|h1|+|h2|)/2, lies
// strictly inside the Voronoi cell of the dual coarse lattice.
bool psi_support_certificate(const NestedPair& pair, const Density& d,
                             std::int64_t h1, std::int64_t h2);

// Theorem-style sufficient-condition audit for the Fejer encoder, with the
// exact noiseless distribution of h1 U + h2 V computed per message.
// tail_override > 0 pins the pmf tail target (default tol/10).
SecrecyReport perfect_secrecy_audit(const NestedPair& pair, const Density& d,
                                    std::int64_t h1, std::int64_t h2,
                                    double tol = 1e-4,
                                    double tail_override = 0.0);

// Flatness-factor audit for the Gaussian encoder: checks every variational
// distance against 16*eps and the leakage against the strong-secrecy bound.
// Runs even when the order condition fails, flagging the expected leakage.
SecrecyReport strong_secrecy_audit(const NestedPair& pair, const Density& d,
                                   std::int64_t h1, std::int64_t h2,
                                   double tail = 1e-9);

// Necessity side: do the labels {k1 x (+) k2 y : y in G} exhaust the group?
// A positive window additionally verifies the label set against a point
// enumeration on that window.
bool support_coverage_check(const NestedPair& pair, std::int64_t k1,
                            std::int64_t k2, int x, double window = 0.0);

} // namespace latticeguard

#endif
