#include "latticeguard/relay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace latticeguard {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller with explicit uniforms so streams are reproducible across
// platforms (std::normal_distribution is implementation-defined).
double gauss(std::mt19937_64& rng) {
    double u1 = 0.0;
    do { u1 = uniform01(rng); } while (u1 <= 0.0);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t uniform_index(std::mt19937_64& rng, std::int64_t m) {
    // rejection sampling avoids modulo bias
    std::uint64_t bound = ~std::uint64_t(0) - (~std::uint64_t(0) % m);
    std::uint64_t v;
    do { v = rng(); } while (v >= bound);
    return static_cast<std::int64_t>(v % static_cast<std::uint64_t>(m));
}

int sample_index(const std::vector<double>& cdf, double u) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u * cdf.back());
    return static_cast<int>(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
}

int thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned cap = hw;
    if (const char* env = std::getenv("LATTICEGUARD_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min(hw, cap));
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
}

std::optional<ReducedGains> reduce_gains(double h1, double h2,
                                         std::int64_t max_den, double tol) {
    if (h1 == 0.0 || h2 == 0.0 || !std::isfinite(h1) || !std::isfinite(h2))
        throw ZeroGain("channel gains must be nonzero and finite");
    const double ratio = h1 / h2;

    // continued-fraction convergents p/q of ratio
    double x = ratio;
    std::int64_t p_prev = 1, q_prev = 0;
    std::int64_t p = static_cast<std::int64_t>(std::floor(x)), q = 1;
    x -= std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        double approx = static_cast<double>(p) / static_cast<double>(q);
        if (std::fabs(ratio - approx) <= tol && q <= max_den && p != 0) {
            ReducedGains rg;
            rg.k1 = p;
            rg.k2 = q;
            std::int64_t g = gcd64(rg.k1, rg.k2);
            rg.k1 /= g;
            rg.k2 /= g;
            rg.h = h2 / static_cast<double>(rg.k2);
            if (std::fabs(rg.h * static_cast<double>(rg.k1) - h1) >
                    1e-9 * std::max(1.0, std::fabs(h1)) ||
                std::fabs(rg.h * static_cast<double>(rg.k2) - h2) >
                    1e-9 * std::max(1.0, std::fabs(h2)))
                return std::nullopt;
            return rg;
        }
        if (q > max_den) return std::nullopt;
        if (x <= 0.0) return std::nullopt; // exhausted expansion without success
        x = 1.0 / x;
        std::int64_t a = static_cast<std::int64_t>(std::floor(x));
        x -= std::floor(x);
        std::int64_t p_next = a * p + p_prev;
        std::int64_t q_next = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
    return std::nullopt;
}

ChannelModel make_channel(double h1, double h2, double noise_var,
                          std::int64_t max_den, double tol) {
    if (noise_var < 0) throw Error("noise variance must be nonnegative");
    ChannelModel ch;
    ch.h1 = h1;
    ch.h2 = h2;
    ch.noise_var = noise_var;
    ch.reduced = reduce_gains(h1, h2, max_den, tol);
    return ch;
}

TrialRecord simulate_one(const NestedPair& pair,
                         const std::vector<CosetPMF>& message_pmfs,
                         const ChannelModel& ch, std::uint64_t seed,
                         std::int64_t trial) {
    if (!ch.reduced) throw NotReduced("channel gains do not reduce to integers");
    const std::int64_t M = pair.index();
    const int n = pair.fine().dim();

    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    TrialRecord rec;
    rec.seed = seed;
    rec.trial = trial;
    rec.x = static_cast<int>(uniform_index(rng, M));
    rec.y = static_cast<int>(uniform_index(rng, M));

    // inverse-CDF draws from the per-message supports
    auto draw = [&](int msg) {
        const CosetPMF& pmf = message_pmfs[msg];
        std::vector<double> cdf(pmf.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            acc += pmf.probs[i];
            cdf[i] = acc;
        }
        int idx = sample_index(cdf, uniform01(rng));
        return Vec(pmf.points.row(idx).transpose());
    };
    rec.u = draw(rec.x);
    rec.v = draw(rec.y);

    rec.w = ch.h1 * rec.u + ch.h2 * rec.v;
    if (ch.noise_var > 0) {
        double sd = std::sqrt(ch.noise_var);
        for (int i = 0; i < n; ++i) rec.w[i] += sd * gauss(rng);
    }

    Vec scaled = rec.w / ch.reduced->h;
    rec.decoded = pair.label_of(closest_point(pair.fine(), scaled).point);
    rec.expected = pair.add(pair.scalar_mul(ch.reduced->k1, rec.x),
                            pair.scalar_mul(ch.reduced->k2, rec.y));
    rec.correct = (rec.decoded == rec.expected);
    return rec;
}

void wilson_interval(std::int64_t errors, std::int64_t trials, double& lo,
                     double& hi) {
    if (trials <= 0) {
        lo = hi = 0.0;
        return;
    }
    const double z = 1.959963984540054; // 95%
    double n = static_cast<double>(trials);
    double phat = static_cast<double>(errors) / n;
    double denom = 1.0 + z * z / n;
    double center = (phat + z * z / (2.0 * n)) / denom;
    double half = z *
                  std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) /
                  denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

MacReport simulate_mac(const NestedPair& pair, const Density& d,
                       const ChannelModel& ch, std::int64_t trials,
                       std::uint64_t seed, double pmf_tail) {
    if (!ch.reduced) throw NotReduced("channel gains do not reduce to integers");
    const std::int64_t M = pair.index();

    std::vector<CosetPMF> pmfs;
    pmfs.reserve(M);
    for (int m = 0; m < M; ++m)
        pmfs.push_back(coset_pmf(d, pair.coarse(), pair.reps()[m].point, pmf_tail));

    // precomputed CDFs shared by all threads
    std::vector<std::vector<double>> cdfs(M);
    for (int m = 0; m < M; ++m) {
        double acc = 0.0;
        cdfs[m].resize(pmfs[m].size());
        for (std::size_t i = 0; i < pmfs[m].size(); ++i) {
            acc += pmfs[m].probs[i];
            cdfs[m][i] = acc;
        }
    }

    const int n = pair.fine().dim();
    auto run_range = [&](std::int64_t lo, std::int64_t hi, std::int64_t& errs) {
        std::int64_t local = 0;
        for (std::int64_t t = lo; t < hi; ++t) {
            std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
            int x = static_cast<int>(uniform_index(rng, M));
            int y = static_cast<int>(uniform_index(rng, M));
            int iu = sample_index(cdfs[x], uniform01(rng));
            int iv = sample_index(cdfs[y], uniform01(rng));
            Vec w = ch.h1 * pmfs[x].points.row(iu).transpose() +
                    ch.h2 * pmfs[y].points.row(iv).transpose();
            if (ch.noise_var > 0) {
                double sd = std::sqrt(ch.noise_var);
                for (int i = 0; i < n; ++i) w[i] += sd * gauss(rng);
            }
            Vec scaled = w / ch.reduced->h;
            int decoded = pair.label_of(closest_point(pair.fine(), scaled).point);
            int expected = pair.add(pair.scalar_mul(ch.reduced->k1, x),
                                    pair.scalar_mul(ch.reduced->k2, y));
            if (decoded != expected) ++local;
        }
        errs = local;
    };

    int nthreads = std::min<std::int64_t>(thread_budget(), std::max<std::int64_t>(1, trials / 1000));
    std::vector<std::int64_t> errs(std::max(1, nthreads), 0);
    if (nthreads <= 1) {
        run_range(0, trials, errs[0]);
    } else {
        std::vector<std::thread> pool;
        std::int64_t chunk = (trials + nthreads - 1) / nthreads;
        for (int i = 0; i < nthreads; ++i) {
            std::int64_t lo = i * chunk;
            std::int64_t hi = std::min<std::int64_t>(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi, std::ref(errs[i]));
        }
        for (auto& th : pool) th.join();
    }

    MacReport rep;
    rep.trials = trials;
    for (std::int64_t e : errs) rep.errors += e;
    rep.error_rate = (trials > 0)
                         ? static_cast<double>(rep.errors) / static_cast<double>(trials)
                         : 0.0;
    wilson_interval(rep.errors, rep.trials, rep.ci_low, rep.ci_high);
    rep.order_condition_ok = true;
    {
        // reuse the group tables for the reported order condition
        const std::int64_t k1 = ch.reduced->k1, k2 = ch.reduced->k2;
        for (int i = 0; i < static_cast<int>(pair.reps().size()); ++i) {
            if (i == pair.zero()) continue;
            std::int64_t ord = pair.element_order(i);
            if (std::llabs(k1) % ord == 0 || std::llabs(k2) % ord == 0) {
                rep.order_condition_ok = false;
                break;
            }
        }
    }
    rep.noise_var = ch.noise_var;
    return rep;
}

EavesdropResult eavesdrop_irrational(const Lattice& L, double h1, double h2,
                                     const Vec& w, int box) {
    if (h1 == 0.0 || h2 == 0.0) throw ZeroGain("gains must be nonzero");
    const int n = L.dim();
    const double tol = 1e-6;

    // At most one v can match a given u: distinct lattice points differ by at
    // least the minimum distance, far above the matching tolerance.
    double min_dist = 2.0 * packing_radius(L) * std::fabs(h2);
    if (min_dist <= 2.0 * tol)
        throw Error("lattice too fine for the matching tolerance");

    EavesdropResult res;
    std::vector<std::int64_t> idx(n, -box);
    CoeffVec cu(n);
    while (true) {
        for (int i = 0; i < n; ++i) cu[i] = idx[i];
        Vec pu = L.point_from_coeffs(cu);
        Vec residual = (w - h1 * pu) / h2;
        Vec creal = L.coeffs_real(residual);
        CoeffVec cv(n);
        bool in_box = true;
        for (int i = 0; i < n; ++i) {
            cv[i] = static_cast<std::int64_t>(std::llround(creal[i]));
            if (std::llabs(cv[i]) > box) in_box = false;
        }
        if (in_box) {
            Vec pv = L.point_from_coeffs(cv);
            if ((h1 * pu + h2 * pv - w).norm() <= tol) {
                ++res.solution_count;
                if (res.solutions.size() < 16) res.solutions.emplace_back(cu, cv);
            }
        }
        int i = 0;
        for (; i < n; ++i) {
            if (++idx[i] <= box) break;
            idx[i] = -box;
        }
        if (i == n) break;
    }
    res.unique = (res.solution_count == 1);
    return res;
}

RateResult rate_perfect(double alpha, double power, double noise_var) {
    if (!(alpha > 0) || !(power > 0) || !(noise_var > 0))
        throw Error("alpha, power and noise variance must be positive");
    RateResult r;
    r.bits = 0.5 * std::log2(alpha * alpha * power / noise_var) -
             std::log2(2.0 * M_E);
    r.infeasible = r.bits <= 0.0;
    return r;
}

RateResult rate_strong(double alpha, double power, double noise_var) {
    if (!(alpha > 0) || !(power > 0) || !(noise_var > 0))
        throw Error("alpha, power and noise variance must be positive");
    RateResult r;
    r.bits = 0.5 * std::log2(alpha * alpha * power / noise_var) -
             0.5 * std::log2(M_E);
    r.infeasible = r.bits <= 0.0;
    return r;
}

RateResult rate_jamming(double h1, double h2, double power, double delta,
                        double noise_var, double noise_var1) {
    if (!(power > 0) || !(noise_var > 0) || !(noise_var1 > 0) || delta < 0)
        throw Error("power and noise variances must be positive, delta >= 0");
    RateResult r;
    double signal = 1.0 + h1 * h1 * power / (2.0 * delta * delta * power + noise_var);
    double leak = 1.0 + h1 * h1 * power / (h2 * h2 * power + noise_var1);
    r.bits = 0.25 * std::log2(signal) - 0.25 * std::log2(leak) -
             0.5 * std::log2(M_E);
    r.infeasible = r.bits <= 0.0;
    return r;
}

bool feasibility(double alpha, std::int64_t k1, std::int64_t k2,
                 SecrecyMode mode) {
    if (!(alpha > 0) || alpha > 1.0)
        throw Error("alpha must lie in (0, 1]");
    if (k1 == 0 || k2 == 0 || gcd64(k1, k2) != 1)
        throw NotCoprime("k1, k2 must be nonzero co-prime integers");
    if (mode == SecrecyMode::Perfect) {
        return 2.0 > alpha * static_cast<double>(std::llabs(k1) + std::llabs(k2));
    }
    return 1.0 >= alpha * alpha * static_cast<double>(k1 * k1 + k2 * k2);
}

} // namespace latticeguard
