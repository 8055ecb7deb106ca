#include "latticeguard/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace latticeguard {

namespace {

constexpr std::size_t kMaxWindowPoints = 100000000; // 10^8

// Per-axis description of an axis-aligned product lattice: basis row `row`
// points along `axis` with signed step `step`.
struct AxisInfo {
    int row;
    int axis;
    double step;
};

bool axis_decompose(const Lattice& L, std::vector<AxisInfo>& axes) {
    const int n = L.dim();
    axes.clear();
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        int axis = -1;
        for (int j = 0; j < n; ++j) {
            if (std::fabs(L.generator()(i, j)) > 1e-12) {
                if (axis >= 0) return false;
                axis = j;
            }
        }
        if (axis < 0 || used[axis]) return false;
        used[axis] = true;
        axes.push_back({i, axis, L.generator()(i, axis)});
    }
    return true;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One-sided comparison helpers for the Fejer tail: mass of f1 at points of
// spacing s outside [-T, T] is at most (4 / (pi r)) (1/T^2 + 1/(s T)).
double fejer_tail_raw(double r, double s, double T) {
    return 4.0 / (M_PI * r) * (1.0 / (T * T) + 1.0 / (s * T));
}

struct Axis1D {
    std::vector<std::int64_t> ks; // basis coefficients
    std::vector<double> xs;       // coordinate values
    std::vector<double> ws;       // raw density values
    double fraction = 0.0;        // certified missing-mass fraction
    double window = 0.0;
};

Axis1D fejer_axis_window(double r, double step, double offset,
                         double fraction_target, double window_boost) {
    Axis1D out;
    const double s = std::fabs(step);
    Density d = Density::fejer(r);
    // The missing fraction behaves like 4/(pi r T); start there and grow
    // until the certified fraction meets the target.
    double T = std::max(4.0 * s, 4.0 / (M_PI * r * fraction_target));
    T *= window_boost;
    for (int iter = 0; iter < 64; ++iter) {
        out.ks.clear();
        out.xs.clear();
        out.ws.clear();
        double a = (-T - offset) / step;
        double b = (T - offset) / step;
        std::int64_t lo = static_cast<std::int64_t>(std::ceil(std::min(a, b)));
        std::int64_t hi = static_cast<std::int64_t>(std::floor(std::max(a, b)));
        if (hi - lo + 1 > static_cast<std::int64_t>(kMaxWindowPoints))
            throw WindowTooLarge("Fejer window exceeds the point budget");
        double sum = 0.0;
        for (std::int64_t k = lo; k <= hi; ++k) {
            double x = offset + static_cast<double>(k) * step;
            double w = d.eval1(x);
            out.ks.push_back(k);
            out.xs.push_back(x);
            out.ws.push_back(w);
            sum += w;
        }
        double bound = fejer_tail_raw(r, s, T);
        if (sum > 0 && bound / sum <= fraction_target) {
            out.fraction = bound / sum;
            out.window = T;
            return out;
        }
        T *= 2.0;
    }
    throw WindowTooLarge("Fejer window search did not converge");
}

} // namespace

Density Density::gaussian(double sigma) {
    if (!(sigma > 0) || !std::isfinite(sigma))
        throw Error("sigma must be positive");
    Density d;
    d.kind = Kind::Gaussian;
    d.sigma = sigma;
    return d;
}

Density Density::fejer(double r) {
    if (!(r > 0) || !std::isfinite(r)) throw Error("r must be positive");
    Density d;
    d.kind = Kind::Fejer;
    d.r = r;
    return d;
}

Density Density::fejer_in_ball(double r_ball, int n) {
    return fejer(r_ball / std::sqrt(static_cast<double>(n)));
}

double Density::eval1(double u) const {
    if (kind == Kind::Gaussian) {
        return std::exp(-u * u / (2.0 * sigma * sigma)) /
               (sigma * std::sqrt(2.0 * M_PI));
    }
    double ru = r * u;
    if (std::fabs(ru) < 1e-6) {
        // series of (1 - cos(ru)) / (pi r u^2) around 0
        return r / (2.0 * M_PI) * (1.0 - ru * ru / 12.0);
    }
    return (1.0 - std::cos(ru)) / (M_PI * r * u * u);
}

double Density::eval(const Vec& u) const {
    double prod = 1.0;
    for (int i = 0; i < u.size(); ++i) prod *= eval1(u[i]);
    return prod;
}

double Density::psi1(double t) const {
    if (kind != Kind::Fejer) throw Error("psi is defined for the Fejer family");
    return std::max(0.0, 1.0 - std::fabs(t) / r);
}

double Density::psi(const Vec& t) const {
    double prod = 1.0;
    for (int i = 0; i < t.size(); ++i) prod *= psi1(t[i]);
    return prod;
}

GaussSumResult gaussian_lattice_sum(const Lattice& L, const Vec& center,
                                    double sigma, double abs_tol) {
    const int n = L.dim();
    const double beta = L.min_singular_value() / sigma;
    Vec tau = L.coeffs_real(center);

    // box exterior bound: n * S_full^{n-1} * S_tail(K) in coefficient space
    double s_full = 1.0 + std::sqrt(2.0 * M_PI) / beta;
    auto tail_k = [&](double K) {
        double st = 2.0 * (std::exp(-beta * beta * K * K / 2.0) +
                           std::sqrt(M_PI / 2.0) / beta *
                               std::erfc(beta * K / std::sqrt(2.0)));
        return n * std::pow(s_full, n - 1) * st;
    };

    double K = std::max(2.0, 3.0 / beta);
    while (tail_k(K) > abs_tol) {
        K *= 1.5;
        if (K > 1e9) throw WindowTooLarge("Gaussian sum window diverged");
    }

    std::vector<std::int64_t> lo(n), hi(n);
    double count = 1;
    for (int i = 0; i < n; ++i) {
        lo[i] = static_cast<std::int64_t>(std::ceil(-K - tau[i]));
        hi[i] = static_cast<std::int64_t>(std::floor(K - tau[i]));
        count *= static_cast<double>(hi[i] - lo[i] + 1);
    }
    if (count > static_cast<double>(kMaxWindowPoints))
        throw WindowTooLarge("Gaussian sum window exceeds the point budget");

    GaussSumResult res;
    res.remainder_bound = tail_k(K);
    CoeffVec c = CoeffVec::Zero(n);
    double sum = 0.0;
    // odometer over the coefficient box
    std::vector<std::int64_t> idx(lo);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    while (true) {
        for (int i = 0; i < n; ++i) c[i] = idx[i];
        Vec p = L.point_from_coeffs(c);
        sum += std::exp(-(p - center).squaredNorm() * inv2s2);
        int i = 0;
        for (; i < n; ++i) {
            if (++idx[i] <= hi[i]) break;
            idx[i] = lo[i];
        }
        if (i == n) break;
    }
    res.value = sum;
    return res;
}

CosetPMF coset_pmf(const Density& d, const Lattice& coset_lattice,
                   const Vec& shift, double tail_target, double window_boost) {
    if (!(tail_target > 0) || tail_target > 1e-3)
        throw Error("tail_target must lie in (0, 1e-3]");
    const int n = coset_lattice.dim();
    if (static_cast<int>(shift.size()) != n)
        throw Error("shift dimension mismatch");

    CosetPMF pmf(coset_lattice, shift);

    std::vector<CoeffVec> coeffs;
    std::vector<double> raw;
    double fraction = 0.0; // certified missing raw-mass fraction

    if (d.kind == Density::Kind::Gaussian) {
        const double sigma = d.sigma;
        const double beta = coset_lattice.min_singular_value() / sigma;
        Vec tau = coset_lattice.coeffs_real(shift);
        double s_full = 1.0 + std::sqrt(2.0 * M_PI) / beta;
        auto tail_k = [&](double K) {
            double st = 2.0 * (std::exp(-beta * beta * K * K / 2.0) +
                               std::sqrt(M_PI / 2.0) / beta *
                                   std::erfc(beta * K / std::sqrt(2.0)));
            return n * std::pow(s_full, n - 1) * st;
        };
        double K = std::max(2.0, std::sqrt(2.0 * std::log(4.0 / tail_target)) / beta);
        K *= window_boost;
        for (int iter = 0;; ++iter) {
            if (iter >= 64)
                throw WindowTooLarge("Gaussian window search did not converge");
            std::vector<std::int64_t> lo(n), hi(n);
            double count = 1;
            for (int i = 0; i < n; ++i) {
                lo[i] = static_cast<std::int64_t>(std::ceil(-K - tau[i]));
                hi[i] = static_cast<std::int64_t>(std::floor(K - tau[i]));
                count *= static_cast<double>(hi[i] - lo[i] + 1);
            }
            if (count > static_cast<double>(kMaxWindowPoints))
                throw WindowTooLarge("Gaussian coset window exceeds the point budget");
            coeffs.clear();
            raw.clear();
            std::vector<std::int64_t> idx(lo);
            double sum = 0.0;
            const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
            const double pref = std::pow(2.0 * M_PI * sigma * sigma, -0.5 * n);
            CoeffVec c(n);
            while (true) {
                for (int i = 0; i < n; ++i) c[i] = idx[i];
                Vec p = coset_lattice.point_from_coeffs(c) + shift;
                double w = pref * std::exp(-p.squaredNorm() * inv2s2);
                coeffs.push_back(c);
                raw.push_back(w);
                sum += w;
                int i = 0;
                for (; i < n; ++i) {
                    if (++idx[i] <= hi[i]) break;
                    idx[i] = lo[i];
                }
                if (i == n) break;
            }
            double bound = pref * tail_k(K);
            if (sum > 0 && bound / sum <= tail_target / 2.0) {
                fraction = bound / sum;
                pmf.window = K;
                break;
            }
            K *= 1.5;
        }
    } else {
        std::vector<AxisInfo> axes;
        if (!axis_decompose(coset_lattice, axes))
            throw Error("Fejer coset sampling requires an axis-aligned product lattice");
        double per_axis_target = tail_target / (2.0 * n);
        std::vector<Axis1D> axis_pmfs;
        double total = 1;
        for (const auto& ax : axes) {
            axis_pmfs.push_back(fejer_axis_window(d.r, ax.step, shift[ax.axis],
                                                  per_axis_target, window_boost));
            total *= static_cast<double>(axis_pmfs.back().ks.size());
            fraction += axis_pmfs.back().fraction;
            pmf.window = std::max(pmf.window, axis_pmfs.back().window);
        }
        if (total > static_cast<double>(kMaxWindowPoints))
            throw WindowTooLarge("Fejer product window exceeds the point budget");
        // product assembly over the per-axis supports
        std::vector<std::size_t> idx(axes.size(), 0);
        CoeffVec c(n);
        while (true) {
            double w = 1.0;
            for (std::size_t a = 0; a < axes.size(); ++a) {
                c[axes[a].row] = axis_pmfs[a].ks[idx[a]];
                w *= axis_pmfs[a].ws[idx[a]];
            }
            if (w > 0.0) {
                coeffs.push_back(c);
                raw.push_back(w);
            }
            std::size_t a = 0;
            for (; a < axes.size(); ++a) {
                if (++idx[a] < axis_pmfs[a].ks.size()) break;
                idx[a] = 0;
            }
            if (a == axes.size()) break;
        }
    }

    // lexicographic support order makes sampling deterministic
    std::vector<std::size_t> order(coeffs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (int i = 0; i < n; ++i) {
            if (coeffs[a][i] != coeffs[b][i]) return coeffs[a][i] < coeffs[b][i];
        }
        return false;
    });

    const std::size_t N = coeffs.size();
    pmf.points.resize(N, n);
    pmf.coeffs.resize(N, n);
    pmf.probs.resize(N);
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) sum += raw[order[i]];
    for (std::size_t i = 0; i < N; ++i) {
        const CoeffVec& c = coeffs[order[i]];
        Vec p = coset_lattice.point_from_coeffs(c) + shift;
        for (int j = 0; j < n; ++j) {
            pmf.points(i, j) = p[j];
            pmf.coeffs(i, j) = c[j];
        }
        pmf.probs[i] = raw[order[i]] / sum;
    }
    // Covers the dropped mass plus the renormalization it induces.
    pmf.tail_bound = 2.0 * fraction;
    return pmf;
}

std::vector<Vec> sample(const CosetPMF& pmf, std::uint64_t seed, int count) {
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf.probs[i];
        cdf[i] = acc;
    }
    std::mt19937_64 rng(seed);
    std::vector<Vec> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        double u = uniform01(rng) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t i = std::min<std::size_t>(it - cdf.begin(), pmf.size() - 1);
        out.push_back(pmf.points.row(i).transpose());
    }
    return out;
}

double average_power(const CosetPMF& pmf) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i)
        acc += pmf.probs[i] * pmf.points.row(i).squaredNorm();
    return acc / static_cast<double>(pmf.points.cols());
}

std::complex<double> periodized_characteristic(const Density& d,
                                               const NestedPair& pair,
                                               const Vec& shift, const Vec& t,
                                               int truncation) {
    if (d.kind != Density::Kind::Fejer)
        throw Error("periodized characteristic requires a compactly supported psi");
    const Lattice dual = fourier_dual(pair.coarse());
    const int n = dual.dim();
    const double r = d.r;

    // Exact containment of the cube [-r, r]^n in the interior of V(dual):
    // only dual vectors of norm <= 2 r sqrt(n) can cut the cube.
    double guard = 2.0 * r * std::sqrt(static_cast<double>(n)) + 1e-9;
    for (const auto& lam : enumerate_ball(dual, Vec::Zero(n), guard)) {
        if (lam.coeffs.isZero()) continue;
        double l1 = lam.point.lpNorm<1>();
        if (r * l1 >= lam.point.squaredNorm() / 2.0 - 1e-12)
            throw SupportViolation("psi support cube is not strictly inside V(dual)");
    }

    // With compact psi the periodization is a finite sum; `truncation` only
    // enlarges the enumeration shell (the extra terms are exact zeros).
    double radius = r * std::sqrt(static_cast<double>(n)) + 1e-9;
    radius += std::max(0, truncation) * 2.0 * packing_radius(dual);
    std::complex<double> acc(0.0, 0.0);
    for (const auto& lam : enumerate_ball(dual, -t, radius)) {
        double w = d.psi(t + lam.point);
        if (w == 0.0) continue;
        double phase = -shift.dot(lam.point);
        acc += w * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return acc;
}

} // namespace latticeguard
