#include "latticeguard/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace latticeguard {

namespace {

constexpr double kBallSlack = 1e-9; // closed-ball inclusion slack

// Lexicographic order on integer coefficient vectors.
bool lex_less(const CoeffVec& a, const CoeffVec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

} // namespace

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& x,
                          std::int64_t& y) {
    if (b == 0) {
        x = (a < 0) ? -1 : 1;
        y = 0;
        return std::llabs(a);
    }
    std::int64_t x1 = 0, y1 = 0;
    std::int64_t g = extended_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

std::uint64_t hash_coeffs(const CoeffVec& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (int i = 0; i < c.size(); ++i) {
        std::uint64_t v = static_cast<std::uint64_t>(c[i]);
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFFu;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

Lattice::Lattice(Mat generator) : gen_(std::move(generator)) {
    if (gen_.rows() != gen_.cols() || gen_.rows() == 0)
        throw SingularGenerator("generator matrix must be square and nonempty");
    if (!gen_.allFinite())
        throw SingularGenerator("generator matrix has non-finite entries");
    n_ = static_cast<int>(gen_.rows());
    basis_cols_ = gen_.transpose();

    Eigen::FullPivLU<Mat> lu(basis_cols_);
    double det = lu.determinant();
    volume_ = std::fabs(det);
    if (volume_ <= 1e-12)
        throw SingularGenerator("generator matrix is singular (|det| <= 1e-12)");
    inv_cols_ = lu.inverse();

    Eigen::HouseholderQR<Mat> qr(basis_cols_);
    q_ = qr.householderQ();
    r_ = qr.matrixQR().triangularView<Eigen::Upper>();
    // Normalize R to a positive diagonal so coordinate intervals are ordered.
    for (int i = 0; i < n_; ++i) {
        if (r_(i, i) < 0) {
            r_.row(i) = -r_.row(i);
            q_.col(i) = -q_.col(i);
        }
    }

    Eigen::JacobiSVD<Mat> svd(basis_cols_);
    smin_ = svd.singularValues().minCoeff();

    shortest_basis_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i)
        shortest_basis_ = std::min(shortest_basis_, gen_.row(i).norm());
}

Vec Lattice::point_from_coeffs(const CoeffVec& c) const {
    Vec cd(n_);
    for (int i = 0; i < n_; ++i) cd[i] = static_cast<double>(c[i]);
    return basis_cols_ * cd;
}

Vec Lattice::coeffs_real(const Vec& x) const { return inv_cols_ * x; }

bool Lattice::contains(const Vec& x, double tol) const {
    Vec a = coeffs_real(x);
    for (int i = 0; i < n_; ++i) {
        if (std::fabs(a[i] - std::round(a[i])) > tol) return false;
    }
    return true;
}

CoeffVec Lattice::coeffs_rounded(const Vec& x) const {
    Vec a = coeffs_real(x);
    CoeffVec c(n_);
    for (int i = 0; i < n_; ++i) c[i] = static_cast<std::int64_t>(std::llround(a[i]));
    return c;
}

Lattice make_lattice(const Mat& generator) { return Lattice(generator); }

Lattice scale_lattice(const Lattice& L, double s) {
    if (s == 0.0 || !std::isfinite(s))
        throw SingularGenerator("scale factor must be nonzero and finite");
    return Lattice(L.generator() * s);
}

Lattice integer_multiple(const Lattice& L, std::int64_t k) {
    if (k == 0) throw SingularGenerator("integer multiple must be nonzero");
    return scale_lattice(L, static_cast<double>(std::llabs(k)));
}

Lattice fourier_dual(const Lattice& L) {
    // <x, B^T c> in 2 pi Z for all c  <=>  x in 2 pi B^{-1} Z^n, i.e. the
    // lattice with row-generator 2 pi B^{-T}.
    Mat dual_gen = 2.0 * M_PI *
                   L.generator().inverse().transpose();
    return Lattice(dual_gen);
}

namespace {

// Depth-first enumeration of all c in Z^n with ||R c - y|| <= radius (+slack),
// columns of R upper triangular with positive diagonal.
struct BallEnumerator {
    const Lattice& L;
    const Vec& center;
    double radius;
    std::size_t max_points;
    std::vector<LatticePoint> out;
    Vec y;          // Q^T center
    CoeffVec c;
    double rad2;

    BallEnumerator(const Lattice& lat, const Vec& ctr, double rad,
                   std::size_t maxp)
        : L(lat), center(ctr), radius(rad), max_points(maxp) {
        y = L.qr_q().transpose() * center;
        c = CoeffVec::Zero(L.dim());
        double r_eff = radius + kBallSlack;
        rad2 = r_eff * r_eff;
    }

    void run() { descend(L.dim() - 1, 0.0); }

    void descend(int i, double acc) {
        const Mat& R = L.qr_r();
        if (i < 0) {
            Vec p = L.point_from_coeffs(c);
            double d = (p - center).norm();
            if (d <= radius + kBallSlack) {
                if (out.size() >= max_points)
                    throw WindowTooLarge("enumeration exceeds point budget");
                out.push_back({p, c});
            }
            return;
        }
        double rem = rad2 - acc;
        if (rem < 0) return;
        double s = 0.0;
        for (int j = i + 1; j < L.dim(); ++j) s += R(i, j) * static_cast<double>(c[j]);
        double target = y[i] - s;
        double halfw = std::sqrt(rem);
        double rii = R(i, i);
        std::int64_t lo = static_cast<std::int64_t>(std::ceil((target - halfw) / rii - 1e-12));
        std::int64_t hi = static_cast<std::int64_t>(std::floor((target + halfw) / rii + 1e-12));
        for (std::int64_t ci = lo; ci <= hi; ++ci) {
            double t = rii * static_cast<double>(ci) - target;
            c[i] = ci;
            descend(i - 1, acc + t * t);
        }
    }
};

} // namespace

std::vector<LatticePoint> enumerate_ball(const Lattice& L, const Vec& center,
                                         double radius, std::size_t max_points) {
    if (L.dim() > Lattice::kMaxExactDim)
        throw DimensionTooLarge("exact enumeration limited to dimension 8");
    if (radius < 0) return {};
    BallEnumerator e(L, center, radius, max_points);
    e.run();
    return e.out;
}

LatticePoint closest_point(const Lattice& L, const Vec& w) {
    if (L.dim() > Lattice::kMaxExactDim)
        throw DimensionTooLarge("exact CVP limited to dimension 8");
    if (!w.allFinite()) throw Error("closest_point: target has non-finite entries");

    // Babai round-off gives a radius that certainly contains the minimizer.
    CoeffVec babai = L.coeffs_rounded(w);
    Vec bp = L.point_from_coeffs(babai);
    double rad = (bp - w).norm();

    auto cands = enumerate_ball(L, w, rad);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : cands) best = std::min(best, (p.point - w).norm());

    const LatticePoint* chosen = nullptr;
    for (const auto& p : cands) {
        double d = (p.point - w).norm();
        if (d > best + kBallSlack) continue;
        if (chosen == nullptr || lex_less(p.coeffs, chosen->coeffs)) chosen = &p;
    }
    return *chosen;
}

double packing_radius(const Lattice& L) {
    if (L.dim() > Lattice::kMaxExactDim)
        throw DimensionTooLarge("exact shortest vector limited to dimension 8");
    // The shortest basis vector bounds lambda1 from above, so the ball of that
    // radius contains a shortest vector.
    double rad = L.shortest_basis_norm();
    auto pts = enumerate_ball(L, Vec::Zero(L.dim()), rad);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        double nrm = p.point.norm();
        if (nrm > 1e-12) best = std::min(best, nrm);
    }
    return best / 2.0;
}

double default_window(const Lattice& L) { return 100.0 * packing_radius(L); }

NestedPair::NestedPair(Lattice fine, Lattice coarse)
    : fine_(std::move(fine)), coarse_(std::move(coarse)) {
    if (fine_.dim() != coarse_.dim())
        throw NotNested("fine and coarse lattices have different dimensions");
    const int n = fine_.dim();

    // Every coarse basis vector must have integer coordinates in the fine basis.
    for (int i = 0; i < n; ++i) {
        Vec row = coarse_.generator().row(i).transpose();
        if (!fine_.contains(row, 1e-9))
            throw NotNested("coarse basis vector is not a fine lattice point");
    }

    double ratio = coarse_.cell_volume() / fine_.cell_volume();
    double rounded = std::round(ratio);
    if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0)
        throw NotNested("volume ratio is not a positive integer");
    index_ = static_cast<std::int64_t>(rounded);

    // Voronoi cell of the coarse lattice sits inside the ball of half the
    // basis diameter; enumerate fine points there and keep those whose
    // tie-broken closest coarse point is the origin.
    double cover = 0.0;
    for (int i = 0; i < n; ++i) cover += coarse_.generator().row(i).norm();
    cover = cover / 2.0 + 1e-6;

    auto fine_pts = enumerate_ball(fine_, Vec::Zero(n), cover);
    for (const auto& p : fine_pts) {
        LatticePoint q = closest_point(coarse_, p.point);
        if (q.coeffs.isZero()) reps_.push_back(p);
    }
    std::sort(reps_.begin(), reps_.end(),
              [](const LatticePoint& a, const LatticePoint& b) {
                  return lex_less(a.coeffs, b.coeffs);
              });
    if (static_cast<std::int64_t>(reps_.size()) != index_)
        throw NotNested("representative count does not match the index");

    for (int i = 0; i < static_cast<int>(reps_.size()); ++i)
        rep_lookup_[hash_coeffs(reps_[i].coeffs)].push_back(i);

    zero_ = label_of(Vec::Zero(n));

    if (index_ <= kTableCap) {
        add_table_.assign(reps_.size(), std::vector<int>(reps_.size(), -1));
        for (std::size_t a = 0; a < reps_.size(); ++a)
            for (std::size_t b = 0; b < reps_.size(); ++b)
                add_table_[a][b] = label_of(reps_[a].point + reps_[b].point);
    }
}

int NestedPair::rep_index_of_coeffs(const CoeffVec& c) const {
    auto it = rep_lookup_.find(hash_coeffs(c));
    if (it == rep_lookup_.end()) return -1;
    for (int idx : it->second) {
        if (reps_[idx].coeffs == c) return idx;
    }
    return -1;
}

int NestedPair::label_of(const Vec& fine_point) const {
    LatticePoint q = closest_point(coarse_, fine_point);
    Vec reduced = fine_point - q.point;
    Vec a = fine_.coeffs_real(reduced);
    CoeffVec c(fine_.dim());
    for (int i = 0; i < fine_.dim(); ++i) {
        double r = std::round(a[i]);
        if (std::fabs(a[i] - r) > 1e-6)
            throw Error("label_of: point is not on the fine lattice");
        c[i] = static_cast<std::int64_t>(r);
    }
    int idx = rep_index_of_coeffs(c);
    if (idx < 0) throw Error("label_of: reduced point is not a representative");
    return idx;
}

int NestedPair::add(int a, int b) const {
    if (!add_table_.empty()) return add_table_[a][b];
    return label_of(reps_[a].point + reps_[b].point);
}

int NestedPair::neg(int a) const {
    return label_of(-reps_[a].point);
}

int NestedPair::scalar_mul(std::int64_t k, int a) const {
    int base = a;
    if (k < 0) {
        base = neg(a);
        k = -k;
    }
    int acc = zero_;
    for (std::int64_t i = 0; i < k; ++i) acc = add(acc, base);
    return acc;
}

std::int64_t NestedPair::element_order(int a) const {
    int acc = a;
    std::int64_t t = 1;
    while (acc != zero_) {
        acc = add(acc, a);
        ++t;
        if (t > index_) throw Error("element order exceeds group size");
    }
    return t;
}

std::vector<std::int64_t> NestedPair::order_multiset() const {
    std::vector<std::int64_t> orders;
    orders.reserve(reps_.size());
    for (int i = 0; i < static_cast<int>(reps_.size()); ++i)
        orders.push_back(element_order(i));
    std::sort(orders.begin(), orders.end());
    return orders;
}

NestedPair make_nested(const Lattice& fine, const Lattice& coarse) {
    return NestedPair(fine, coarse);
}

bool combine_coprime_check(const Lattice& L, std::int64_t k1, std::int64_t k2,
                           double rho) {
    if (k1 == 0 || k2 == 0 || gcd64(k1, k2) != 1)
        throw NotCoprime("k1, k2 must be nonzero co-prime integers");
    std::int64_t a = 0, b = 0;
    extended_gcd(k1, k2, a, b); // a k1 + b k2 = 1

    auto targets = enumerate_ball(L, Vec::Zero(L.dim()), rho);
    double ball_u = static_cast<double>(std::llabs(a)) * rho + kBallSlack;
    double ball_v = static_cast<double>(std::llabs(b)) * rho + kBallSlack;
    for (const auto& w : targets) {
        // Bezout witnesses u = a w, v = b w; both stay in the enlarged balls.
        CoeffVec cu = a * w.coeffs;
        CoeffVec cv = b * w.coeffs;
        CoeffVec combo = k1 * cu + k2 * cv;
        if (combo != w.coeffs) return false;
        if (L.point_from_coeffs(cu).norm() > ball_u) return false;
        if (L.point_from_coeffs(cv).norm() > ball_v) return false;
    }
    return true;
}

CosetIntersection coset_intersection(const Lattice& L, std::int64_t k1,
                                     std::int64_t k2, const Vec& w1,
                                     const Vec& w2, double rho) {
    if (k1 == 0 || k2 == 0 || gcd64(k1, k2) != 1)
        throw NotCoprime("k1, k2 must be nonzero co-prime integers");
    CosetIntersection result;
    result.window = rho;

    Vec w = w2 - w1;
    if (!L.contains(w, 1e-9)) return result; // empty

    CoeffVec cw = L.coeffs_rounded(w);
    std::int64_t a = 0, b = 0;
    extended_gcd(k1, k2, a, b);

    // Solve k1 cu + k2 cv = cw componentwise; shift cu toward zero.
    CoeffVec cu(L.dim());
    for (int i = 0; i < L.dim(); ++i) {
        std::int64_t x0 = a * cw[i];
        std::int64_t t = (k2 != 0) ? std::int64_t(std::llround(double(x0) / double(k2))) : 0;
        cu[i] = x0 - t * k2;
    }
    // cv from the remaining part (exact integer division).
    CoeffVec cv(L.dim());
    for (int i = 0; i < L.dim(); ++i) {
        std::int64_t rem = cw[i] - k1 * cu[i];
        if (rem % k2 != 0) throw Error("coset_intersection: inconsistent Bezout solve");
        cv[i] = rem / k2;
    }

    Vec u = L.point_from_coeffs(cu);
    Vec wprime = static_cast<double>(k1) * u + w1;

    Lattice sub = integer_multiple(L, k1 * k2);
    // Canonicalize the shift into the Voronoi cell of k1 k2 L.
    wprime = wprime - closest_point(sub, wprime).point;

    // Truncated point set of k1 k2 L + w' within the window.
    auto kkpts = enumerate_ball(sub, -wprime, rho);
    std::vector<Vec> pts;
    pts.reserve(kkpts.size());
    for (const auto& p : kkpts) pts.push_back(p.point + wprime);

    // Verify against a direct computation of (k1 L + w1) cap (k2 L + w2).
    Lattice l1 = integer_multiple(L, k1);
    Lattice l2 = integer_multiple(L, k2);
    auto c1pts = enumerate_ball(l1, -w1, rho);
    std::vector<Vec> direct;
    for (const auto& p : c1pts) {
        Vec x = p.point + w1;
        if (l2.contains(x - w2, 1e-7)) direct.push_back(x);
    }
    auto key = [&](const Vec& x) { return hash_coeffs(L.coeffs_rounded(x)); };
    std::vector<std::uint64_t> ka, kb;
    for (const auto& x : pts) ka.push_back(key(x));
    for (const auto& x : direct) kb.push_back(key(x));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    if (ka != kb)
        throw Error("coset_intersection: verification failed on the window");

    result.empty = false;
    result.shift = wprime;
    result.points = std::move(pts);
    return result;
}

} // namespace latticeguard
