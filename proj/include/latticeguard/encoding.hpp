#ifndef LATTICEGUARD_ENCODING_HPP
#define LATTICEGUARD_ENCODING_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "latticeguard/lattice.hpp"

namespace latticeguard {

// Encoder randomization law.  Gaussian: product of N(0, sigma^2) per
// coordinate.  Fejer: product of per-coordinate densities
//   f1(u) = (1 - cos(r u)) / (pi r u^2),   f1(0) = r / (2 pi),
// whose characteristic function is the triangle psi1(t) = max(0, 1 - |t|/r);
// the n-dimensional characteristic function is supported on the cube
// [-r, r]^n.
struct Density {
    enum class Kind { Gaussian, Fejer };

    Kind kind = Kind::Gaussian;
    double sigma = 1.0; // Gaussian: per-coordinate standard deviation
    double r = 1.0;     // Fejer: characteristic-function half-width

    static Density gaussian(double sigma);
    static Density fejer(double r);
    // Fejer half-width chosen so the support cube fits in the ball of
    // radius r_ball (r = r_ball / sqrt(n)).
    static Density fejer_in_ball(double r_ball, int n);

    double eval1(double u) const;      // per-coordinate density
    double eval(const Vec& u) const;   // product density
    double psi1(double t) const;       // triangle (Fejer only)
    double psi(const Vec& t) const;    // product of triangles
};

// Truncated pmf on a lattice coset.  Probabilities are the density values
// normalized over the enumerated window; tail_bound certifies the L1
// distance to the exact (untruncated) pmf, covering both the missing mass
// and the renormalization it causes.
struct CosetPMF {
    CosetPMF(Lattice l, Vec s) : lattice(std::move(l)), shift(std::move(s)) {}

    Lattice lattice;
    Vec shift;
    Mat points;                     // one support point per row
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> coeffs;
    Eigen::VectorXd probs;
    double tail_bound = 0.0;
    double window = 0.0;            // enumeration window actually used

    std::size_t size() const { return static_cast<std::size_t>(probs.size()); }
};

// window_boost (testing hook) multiplies the certified window before
// enumeration; probabilities must be stable under it within tail_target.
CosetPMF coset_pmf(const Density& d, const Lattice& coset_lattice,
                   const Vec& shift, double tail_target,
                   double window_boost = 1.0);

// i.i.d. draws by inverse CDF over the lexicographically sorted support.
std::vector<Vec> sample(const CosetPMF& pmf, std::uint64_t seed, int count);

// (1/n) sum p(u) ||u||^2 over the truncated support.
double average_power(const CosetPMF& pmf);

// Lattice-periodized characteristic function
//   phi(t) = sum_{lam in dual(coarse)} psi(t + lam) exp(-i <shift, lam>),
// exact for compactly supported psi.  Throws SupportViolation unless the
// support cube lies strictly inside the Voronoi cell of the dual lattice.
std::complex<double> periodized_characteristic(const Density& d,
                                               const NestedPair& pair,
                                               const Vec& shift, const Vec& t,
                                               int truncation = 0);

// sum over lattice points of exp(-||p - center||^2 / (2 sigma^2)) with a
// certified remainder bound <= abs_tol (no density prefactor).
struct GaussSumResult {
    double value = 0.0;
    double remainder_bound = 0.0;
};
GaussSumResult gaussian_lattice_sum(const Lattice& L, const Vec& center,
                                    double sigma, double abs_tol);

} // namespace latticeguard

#endif
