#ifndef LATTICEGUARD_LATTICE_HPP
#define LATTICEGUARD_LATTICE_HPP

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "latticeguard/errors.hpp"

namespace latticeguard {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CoeffVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// A point together with its integer coefficients in the owning basis.
struct LatticePoint {
    Vec point;
    CoeffVec coeffs;
};

// Full-rank lattice given by a generator matrix whose ROWS are the basis
// vectors: a point is generator^T * c for c in Z^n.  Exact CVP and ball
// enumeration are supported up to dimension 8.
class Lattice {
public:
    static constexpr int kMaxExactDim = 8;

    explicit Lattice(Mat generator);

    int dim() const { return n_; }
    const Mat& generator() const { return gen_; }
    double cell_volume() const { return volume_; }

    Vec point_from_coeffs(const CoeffVec& c) const;
    // Real (unrounded) solution a of generator^T a = x.
    Vec coeffs_real(const Vec& x) const;
    bool contains(const Vec& x, double tol = 1e-9) const;
    // Rounds coeffs_real; with the residual this is the Babai estimate.
    CoeffVec coeffs_rounded(const Vec& x) const;

    double min_singular_value() const { return smin_; }
    double shortest_basis_norm() const { return shortest_basis_; }

    // QR data of generator^T used by the enumeration routines.
    const Mat& basis_columns() const { return basis_cols_; }
    const Mat& qr_q() const { return q_; }
    const Mat& qr_r() const { return r_; }

private:
    Mat gen_;        // rows are basis vectors
    Mat basis_cols_; // gen_^T, columns are basis vectors
    Mat inv_cols_;   // (gen_^T)^{-1}
    Mat q_, r_;      // basis_cols_ = q_ * r_, r_ upper triangular, positive diagonal
    int n_ = 0;
    double volume_ = 0.0;
    double smin_ = 0.0;
    double shortest_basis_ = 0.0;
};

Lattice make_lattice(const Mat& generator);
Lattice scale_lattice(const Lattice& L, double s);
// Integer-scaled sublattice k*L (|k| applied to the basis).
Lattice integer_multiple(const Lattice& L, std::int64_t k);

// Fourier dual: { x : <x,y> in 2*pi*Z for all y in L }.
Lattice fourier_dual(const Lattice& L);

// All lattice points p with ||p - center|| <= radius + 1e-9 (closed ball with
// an absolute slack so exactly-on-boundary points are kept).  Throws
// WindowTooLarge if more than max_points would be produced.
std::vector<LatticePoint> enumerate_ball(const Lattice& L, const Vec& center,
                                         double radius,
                                         std::size_t max_points = 100000000);

// Exact CVP by sphere enumeration; distance ties are broken by the
// lexicographically smallest integer coefficient vector.
LatticePoint closest_point(const Lattice& L, const Vec& w);

// Half the length of a shortest nonzero vector.
double packing_radius(const Lattice& L);

// Default enumeration window used by the set-algebra checks: 50 times the
// shortest nonzero vector length.
double default_window(const Lattice& L);

// Quotient group of a nested pair, represented by the coset representatives
// of coarse in fine that lie in the (tie-broken) Voronoi cell of coarse.
class NestedPair {
public:
    // Tables are materialised up to this index; larger groups compute the
    // group operation on demand through CVP reduction.
    static constexpr std::int64_t kTableCap = 2048;

    NestedPair(Lattice fine, Lattice coarse);

    const Lattice& fine() const { return fine_; }
    const Lattice& coarse() const { return coarse_; }
    std::int64_t index() const { return index_; }
    const std::vector<LatticePoint>& reps() const { return reps_; }
    bool has_add_table() const { return !add_table_.empty(); }
    const std::vector<std::vector<int>>& add_table() const { return add_table_; }

    // Reduces an arbitrary fine-lattice point to its coset label.
    int label_of(const Vec& fine_point) const;
    int add(int a, int b) const;
    int neg(int a) const;
    // k*a in the quotient group (k may be negative or zero).
    int scalar_mul(std::int64_t k, int a) const;
    int zero() const { return zero_; }
    // Smallest t >= 1 with t*a = 0.
    std::int64_t element_order(int a) const;
    std::vector<std::int64_t> order_multiset() const;

private:
    int rep_index_of_coeffs(const CoeffVec& c) const;

    Lattice fine_;
    Lattice coarse_;
    std::int64_t index_ = 0;
    std::vector<LatticePoint> reps_;
    std::vector<std::vector<int>> add_table_;
    std::unordered_map<std::uint64_t, std::vector<int>> rep_lookup_;
    int zero_ = -1;
};

NestedPair make_nested(const Lattice& fine, const Lattice& coarse);

// Empirical verification of {k1 u + k2 v : u,v in L} = L on a window: every
// lattice point within rho of the origin must decompose with the witnesses
// staying inside the Bezout ball max(|a|,|b|)*rho.
bool combine_coprime_check(const Lattice& L, std::int64_t k1, std::int64_t k2,
                           double rho);

struct CosetIntersection {
    bool empty = true;
    Vec shift;               // w' with (k1 L + w1) cap (k2 L + w2) = k1 k2 L + w'
    std::vector<Vec> points; // the verified truncated point set within rho of 0
    double window = 0.0;
};

CosetIntersection coset_intersection(const Lattice& L, std::int64_t k1,
                                     std::int64_t k2, const Vec& w1,
                                     const Vec& w2, double rho);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
// g = a*x + b*y with g = gcd(|a|,|b|).
std::int64_t extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& x,
                          std::int64_t& y);

std::uint64_t hash_coeffs(const CoeffVec& c);

} // namespace latticeguard

#endif
