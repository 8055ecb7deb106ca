#include "latticeguard/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <fftw3.h>

#include "latticeguard/construction_a.hpp"

namespace latticeguard {

namespace {

constexpr double kInv16e = 1.0 / (16.0 * M_E);

double log2_ratio(double p, double q) {
    // log2(p/q) evaluated stably for p close to q
    return std::log1p((p - q) / q) / M_LN2;
}

std::vector<double> direct_convolve(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    }
    return out;
}

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    const std::size_t out_len = a.size() + b.size() - 1;
    if (static_cast<double>(a.size()) * static_cast<double>(b.size()) < 4.0e6)
        return direct_convolve(a, b);

    std::size_t n = 1;
    while (n < out_len) n <<= 1;
    const std::size_t nc = n / 2 + 1;

    double* buf = fftw_alloc_real(n);
    fftw_complex* spec_a = fftw_alloc_complex(nc);
    fftw_complex* spec_b = fftw_alloc_complex(nc);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf, spec_a,
                                         FFTW_ESTIMATE);

    std::fill(buf, buf + n, 0.0);
    std::copy(a.begin(), a.end(), buf);
    fftw_execute(fwd);

    fftw_plan fwd_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf, spec_b,
                                           FFTW_ESTIMATE);
    std::fill(buf, buf + n, 0.0);
    std::copy(b.begin(), b.end(), buf);
    fftw_execute(fwd_b);

    for (std::size_t i = 0; i < nc; ++i) {
        std::complex<double> pa(spec_a[i][0], spec_a[i][1]);
        std::complex<double> pb(spec_b[i][0], spec_b[i][1]);
        std::complex<double> pc = pa * pb;
        spec_a[i][0] = pc.real();
        spec_a[i][1] = pc.imag();
    }

    fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_a, buf,
                                         FFTW_ESTIMATE);
    fftw_execute(inv);

    std::vector<double> out(out_len);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < out_len; ++i)
        out[i] = std::max(0.0, buf[i] * scale); // clamp FFT round-off
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(fwd_b);
    fftw_destroy_plan(inv);
    fftw_free(buf);
    fftw_free(spec_a);
    fftw_free(spec_b);
    return out;
}

// Integer coefficient map from coarse to fine basis: coarse = Mcf * fine.
Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> coarse_in_fine(
    const NestedPair& pair) {
    const int n = pair.fine().dim();
    Mat m = pair.coarse().generator() * pair.fine().generator().inverse();
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> mi(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double r = std::round(m(i, j));
            if (std::fabs(m(i, j) - r) > 1e-6)
                throw Error("coarse basis is not integral in the fine basis");
            mi(i, j) = static_cast<std::int64_t>(r);
        }
    return mi;
}

// h * (coset pmf on coarse + rep) as a sparse mass on the fine grid.
MassFunction scaled_coset_mass(const NestedPair& pair, const CosetPMF& pmf,
                               int rep_label, std::int64_t h) {
    const int n = pair.fine().dim();
    auto mcf = coarse_in_fine(pair);
    const CoeffVec& rep = pair.reps()[rep_label].coeffs;
    MassFunction out(pair.fine());
    MassFunction::Key key(n);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        for (int j = 0; j < n; ++j) {
            std::int64_t v = rep[j];
            for (int k = 0; k < n; ++k) v += mcf(k, j) * pmf.coeffs(i, k);
            key[j] = h * v;
        }
        out.add(key, pmf.probs[i]);
    }
    out.set_l1_error(pmf.tail_bound);
    return out;
}

} // namespace

void MassFunction::add(const Key& k, double p) {
    if (p == 0.0) return;
    entries_[k] += p;
}

double MassFunction::total() const {
    double t = 0.0;
    for (const auto& [k, p] : entries_) t += p;
    return t;
}

Vec MassFunction::point_of(const Key& k) const {
    CoeffVec c(base_.dim());
    for (int i = 0; i < base_.dim(); ++i) c[i] = k[i];
    return base_.point_from_coeffs(c);
}

MassFunction convolve(const MassFunction& a, const MassFunction& b,
                      double op_budget) {
    double ops = static_cast<double>(a.entries().size()) *
                 static_cast<double>(b.entries().size());
    if (ops > op_budget)
        throw WindowTooLarge("sparse convolution exceeds the operation budget");
    MassFunction out(a.base());
    MassFunction::Key key(a.base().dim());
    for (const auto& [ka, pa] : a.entries()) {
        for (const auto& [kb, pb] : b.entries()) {
            for (std::size_t i = 0; i < key.size(); ++i) key[i] = ka[i] + kb[i];
            out.add(key, pa * pb);
        }
    }
    out.set_l1_error(a.l1_error() + b.l1_error() + a.l1_error() * b.l1_error());
    return out;
}

MassFunction mix(const std::vector<const MassFunction*>& parts,
                 const std::vector<double>& weights) {
    if (parts.empty() || parts.size() != weights.size())
        throw Error("mix: parts and weights must match and be nonempty");
    MassFunction out(parts[0]->base());
    double err = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (const auto& [k, p] : parts[i]->entries()) out.add(k, weights[i] * p);
        err += weights[i] * parts[i]->l1_error();
    }
    out.set_l1_error(err);
    return out;
}

MassFunction w_distribution(const NestedPair& pair, const Density& d,
                            std::int64_t h1, std::int64_t h2,
                            std::optional<int> x, std::optional<int> y,
                            double tail) {
    if (h1 == 0 || h2 == 0 || gcd64(h1, h2) != 1)
        throw NotCoprime("h1, h2 must be nonzero co-prime integers");
    if (y.has_value() && !x.has_value())
        throw Error("conditioning on y alone is not supported");
    const std::int64_t M = pair.index();
    const double unif = 1.0 / static_cast<double>(M);

    auto side_mass = [&](std::int64_t h, std::optional<int> fixed) {
        std::vector<MassFunction> per;
        per.reserve(fixed ? 1 : M);
        if (fixed) {
            CosetPMF pmf = coset_pmf(d, pair.coarse(),
                                     pair.reps()[*fixed].point, tail);
            per.push_back(scaled_coset_mass(pair, pmf, *fixed, h));
            return per.back();
        }
        std::vector<const MassFunction*> ptrs;
        for (int m = 0; m < M; ++m) {
            CosetPMF pmf = coset_pmf(d, pair.coarse(), pair.reps()[m].point, tail);
            per.push_back(scaled_coset_mass(pair, pmf, m, h));
        }
        for (const auto& mfn : per) ptrs.push_back(&mfn);
        return mix(ptrs, std::vector<double>(M, unif));
    };

    MassFunction mu = side_mass(h1, x);
    MassFunction mv = side_mass(h2, y);
    return convolve(mu, mv);
}

ValueErr variational_distance(const MassFunction& p, const MassFunction& q) {
    ValueErr out;
    auto ip = p.entries().begin();
    auto iq = q.entries().begin();
    double acc = 0.0;
    while (ip != p.entries().end() || iq != q.entries().end()) {
        if (iq == q.entries().end() ||
            (ip != p.entries().end() && ip->first < iq->first)) {
            acc += std::fabs(ip->second);
            ++ip;
        } else if (ip == p.entries().end() || iq->first < ip->first) {
            acc += std::fabs(iq->second);
            ++iq;
        } else {
            acc += std::fabs(ip->second - iq->second);
            ++ip;
            ++iq;
        }
    }
    out.value = acc;
    out.error = p.l1_error() + q.l1_error();
    return out;
}

ValueErr mutual_information(const std::vector<double>& prior,
                            const std::vector<MassFunction>& conditionals) {
    if (prior.size() != conditionals.size() || prior.empty())
        throw Error("mutual_information: prior/conditional size mismatch");
    std::vector<const MassFunction*> ptrs;
    for (const auto& c : conditionals) ptrs.push_back(&c);
    MassFunction mixture = mix(ptrs, prior);

    double bits = 0.0;
    double missing = 0.0;
    double pmin = 1.0;
    for (std::size_t i = 0; i < prior.size(); ++i) {
        if (prior[i] <= 0) continue;
        pmin = std::min(pmin, prior[i]);
        missing += prior[i] * conditionals[i].l1_error();
        for (const auto& [k, pw] : conditionals[i].entries()) {
            if (pw <= 0) continue;
            auto it = mixture.entries().find(k);
            double pm = (it == mixture.entries().end()) ? 0.0 : it->second;
            if (pm <= 0) continue;
            bits += prior[i] * pw * log2_ratio(pw, pm);
        }
    }
    ValueErr out;
    out.value = bits;
    // Truncation can hide at most the missing mass, each unit of which moves
    // the plug-in value by at most log2(1/prior) - log2(missing).
    out.error = (missing > 0)
                    ? missing * (std::log2(1.0 / pmin) - std::log2(missing))
                    : 0.0;
    return out;
}

double strong_secrecy_bound(double eps, std::int64_t M) {
    if (M <= 4) throw GroupTooSmall("the bound requires |G| > 4");
    if (!(eps < kInv16e))
        throw EpsilonTooLarge("the bound requires eps < 1/(16e)");
    if (eps < 0) throw Error("eps must be nonnegative");
    if (eps == 0) return 0.0;
    double v = 16.0 * eps / 3.0;
    return v * (std::log2(static_cast<double>(M)) - std::log2(v));
}

double flatness_factor(const Lattice& L, double theta, FlatnessMethod method) {
    if (!(theta > 0)) throw Error("theta must be positive");
    if (method == FlatnessMethod::FourierSum) {
        Lattice dual = fourier_dual(L);
        GaussSumResult gs =
            gaussian_lattice_sum(dual, Vec::Zero(L.dim()), 1.0 / theta, 1e-15);
        return gs.value - 1.0; // remove the lambda = 0 term
    }

    const int n = L.dim();
    if (n > 2)
        throw DimensionTooLarge("PrimalGrid flatness is limited to n <= 2");
    const int grid = 1000;
    const double vol = L.cell_volume();
    const double pref = std::pow(2.0 * M_PI * theta * theta, -0.5 * n);

    // One fixed coefficient box serves every grid point: the certified
    // remainder bound is uniform in the fractional offset.
    const double beta = L.min_singular_value() / theta;
    double s_full = 1.0 + std::sqrt(2.0 * M_PI) / beta;
    auto tail_k = [&](double K) {
        double st = 2.0 * (std::exp(-beta * beta * K * K / 2.0) +
                           std::sqrt(M_PI / 2.0) / beta *
                               std::erfc(beta * K / std::sqrt(2.0)));
        return n * std::pow(s_full, n - 1) * st;
    };
    const double tol_sum = 1e-12 / (vol * pref);
    double K = std::max(2.0, 3.0 / beta);
    while (tail_k(K) > tol_sum) K *= 1.25;

    std::int64_t kc = static_cast<std::int64_t>(std::ceil(K)) + 1;
    std::vector<Vec> pts;
    std::vector<std::int64_t> idx(n, -kc);
    CoeffVec c(n);
    while (true) {
        for (int i = 0; i < n; ++i) c[i] = idx[i];
        pts.push_back(L.point_from_coeffs(c));
        int i = 0;
        for (; i < n; ++i) {
            if (++idx[i] <= kc) break;
            idx[i] = -kc;
        }
        if (i == n) break;
    }

    const double inv2t2 = 1.0 / (2.0 * theta * theta);
    double best = 0.0;
    std::vector<int> g(n, 0);
    while (true) {
        Vec t(n);
        for (int i = 0; i < n; ++i)
            t[i] = static_cast<double>(g[i]) / static_cast<double>(grid);
        Vec xpt = L.generator().transpose() * t;
        double sum = 0.0;
        for (const auto& p : pts) {
            double d2 = (p - xpt).squaredNorm();
            if (d2 * inv2t2 < 60.0) sum += std::exp(-d2 * inv2t2);
        }
        best = std::max(best, std::fabs(vol * pref * sum - 1.0));
        int i = 0;
        for (; i < n; ++i) {
            if (++g[i] < grid) break;
            g[i] = 0;
        }
        if (i == n) break;
    }
    return best;
}

bool psi_support_certificate(const NestedPair& pair, const Density& d,
                             std::int64_t h1, std::int64_t h2) {
    if (d.kind != Density::Kind::Fejer)
        throw Error("the support certificate requires a compactly supported psi");
    const int n = pair.fine().dim();
    Lattice dual = fourier_dual(pair.coarse());
    double rho = d.r * static_cast<double>(std::llabs(h1) + std::llabs(h2)) / 2.0;
    double guard = 2.0 * rho * std::sqrt(static_cast<double>(n)) + 1e-9;
    for (const auto& lam : enumerate_ball(dual, Vec::Zero(n), guard)) {
        if (lam.coeffs.isZero()) continue;
        if (rho * lam.point.lpNorm<1>() >=
            lam.point.squaredNorm() / 2.0 - 1e-12)
            return false;
    }
    return true;
}

bool support_coverage_check(const NestedPair& pair, std::int64_t k1,
                            std::int64_t k2, int x, double window) {
    if (gcd64(k1, k2) != 1 || k1 == 0 || k2 == 0)
        throw NotCoprime("k1, k2 must be nonzero co-prime integers");
    const std::int64_t M = pair.index();
    std::vector<bool> seen(M, false);
    int kx = pair.scalar_mul(k1, x);
    std::int64_t count = 0;
    for (int y = 0; y < M; ++y) {
        int lbl = pair.add(kx, pair.scalar_mul(k2, y));
        if (!seen[lbl]) {
            seen[lbl] = true;
            ++count;
        }
    }
    bool covered = (count == M);
    if (window > 0) {
        // cross-check the label set against fine points on the window
        bool geometric = true;
        for (const auto& p :
             enumerate_ball(pair.fine(), Vec::Zero(pair.fine().dim()), window)) {
            if (!seen[pair.label_of(p.point)]) {
                geometric = false;
                break;
            }
        }
        if (geometric != covered)
            throw Error("support coverage: label set and window enumeration disagree");
    }
    return covered;
}

namespace {

// Dense per-coset engine for 1-dimensional pairs: computes every variational
// distance and the plug-in leakage without materialising the sparse maps.
struct DenseNumerics {
    std::vector<ValueErr> per_message;
    ValueErr max_variational;
    ValueErr leakage;
    double accumulated_tail = 0.0;
};

struct Dense1DArray {
    std::int64_t base = 0;   // fine-grid index of vals[0]
    std::int64_t stride = 0; // fine-grid index step, positive
    std::vector<double> vals;
};

Dense1DArray dense_from_pmf(const CosetPMF& pmf, double fine_step,
                            std::int64_t h) {
    Dense1DArray arr;
    const std::size_t N = pmf.size();
    std::vector<std::int64_t> pos(N);
    for (std::size_t i = 0; i < N; ++i) {
        double v = pmf.points(i, 0) / fine_step;
        std::int64_t r = static_cast<std::int64_t>(std::llround(v));
        if (std::fabs(v - static_cast<double>(r)) > 1e-6)
            throw Error("coset point is not on the fine grid");
        pos[i] = h * r;
    }
    arr.vals.assign(N, 0.0);
    if (N == 1) {
        arr.base = pos[0];
        arr.stride = 1;
        arr.vals[0] = pmf.probs[0];
        return arr;
    }
    std::int64_t step = pos[1] - pos[0];
    for (std::size_t i = 1; i < N; ++i) {
        if (pos[i] - pos[i - 1] != step)
            throw Error("coset support is not an arithmetic progression");
    }
    if (step > 0) {
        arr.base = pos[0];
        arr.stride = step;
        for (std::size_t i = 0; i < N; ++i) arr.vals[i] = pmf.probs[i];
    } else {
        arr.base = pos[N - 1];
        arr.stride = -step;
        for (std::size_t i = 0; i < N; ++i) arr.vals[i] = pmf.probs[N - 1 - i];
    }
    return arr;
}

std::vector<double> expand_to_units(const Dense1DArray& a, std::int64_t M) {
    if (a.stride % M != 0)
        throw Error("support stride is not a multiple of the group index");
    std::int64_t su = a.stride / M;
    std::vector<double> out((a.vals.size() - 1) * su + 1, 0.0);
    for (std::size_t i = 0; i < a.vals.size(); ++i) out[i * su] = a.vals[i];
    return out;
}

DenseNumerics dense_perfect_numerics(const NestedPair& pair, const Density& d,
                                     std::int64_t h1, std::int64_t h2,
                                     double tail) {
    const std::int64_t M = pair.index();
    const double fine_step = pair.fine().generator()(0, 0);
    const double unif = 1.0 / static_cast<double>(M);

    std::vector<CosetPMF> pmfs;
    pmfs.reserve(M);
    for (int m = 0; m < M; ++m)
        pmfs.push_back(coset_pmf(d, pair.coarse(), pair.reps()[m].point, tail));

    std::vector<Dense1DArray> us, vs;
    for (int m = 0; m < M; ++m) {
        us.push_back(dense_from_pmf(pmfs[m], fine_step, h1));
        vs.push_back(dense_from_pmf(pmfs[m], fine_step, h2));
    }

    // Pair (x, y) produces mass on the single fine-grid residue
    // (baseU + baseV) mod M; group pairs by that residue.
    struct PairInfo {
        int x, y;
        std::int64_t offset; // baseU + baseV
        std::int64_t qstart; // (offset - c) / M
        std::int64_t len;    // conv length in M-units
    };
    std::vector<std::vector<PairInfo>> by_coset(M);
    for (int x = 0; x < M; ++x) {
        std::int64_t lu =
            (static_cast<std::int64_t>(us[x].vals.size()) - 1) * (us[x].stride / M);
        for (int y = 0; y < M; ++y) {
            std::int64_t lv =
                (static_cast<std::int64_t>(vs[y].vals.size()) - 1) * (vs[y].stride / M);
            PairInfo info;
            info.x = x;
            info.y = y;
            info.offset = us[x].base + vs[y].base;
            std::int64_t c = ((info.offset % M) + M) % M;
            info.qstart = (info.offset - c) / M;
            info.len = lu + lv + 1;
            by_coset[c].push_back(info);
        }
    }

    double max_u_tail = 0.0, max_v_tail = 0.0;
    for (int m = 0; m < M; ++m)
        max_u_tail = std::max(max_u_tail, pmfs[m].tail_bound);
    max_v_tail = max_u_tail;
    double err_cond = max_u_tail + max_v_tail + max_u_tail * max_v_tail;

    std::vector<double> vdist(M, 0.0);
    double bits = 0.0;

    for (std::int64_t c = 0; c < M; ++c) {
        if (by_coset[c].empty()) continue;
        std::int64_t qmin = by_coset[c].front().qstart;
        std::int64_t qmax = qmin;
        for (const auto& info : by_coset[c]) {
            qmin = std::min(qmin, info.qstart);
            qmax = std::max(qmax, info.qstart + info.len - 1);
        }
        std::size_t len = static_cast<std::size_t>(qmax - qmin + 1);

        std::vector<double> pw(len, 0.0);
        std::vector<std::vector<double>> pwx(M);
        for (const auto& info : by_coset[c]) {
            auto conv = fft_convolve(expand_to_units(us[info.x], M),
                                     expand_to_units(vs[info.y], M));
            if (pwx[info.x].empty()) pwx[info.x].assign(len, 0.0);
            std::size_t off = static_cast<std::size_t>(info.qstart - qmin);
            for (std::size_t i = 0; i < conv.size(); ++i) {
                pw[off + i] += unif * unif * conv[i];
                pwx[info.x][off + i] += unif * conv[i];
            }
        }
        for (int x = 0; x < M; ++x) {
            if (pwx[x].empty()) {
                for (double v : pw) vdist[x] += v;
                continue;
            }
            for (std::size_t i = 0; i < len; ++i) {
                vdist[x] += std::fabs(pw[i] - pwx[x][i]);
                if (pwx[x][i] > 0 && pw[i] > 0)
                    bits += unif * pwx[x][i] * log2_ratio(pwx[x][i], pw[i]);
            }
        }
    }

    DenseNumerics out;
    out.per_message.resize(M);
    double err_pair = err_cond + err_cond; // conditional plus marginal masses
    for (int x = 0; x < M; ++x) {
        out.per_message[x] = {vdist[x], err_pair};
        if (vdist[x] > out.max_variational.value) out.max_variational.value = vdist[x];
    }
    out.max_variational.error = err_pair;
    out.accumulated_tail = err_pair;
    double missing = err_cond;
    out.leakage = {bits, (missing > 0)
                             ? missing * (std::log2(static_cast<double>(M)) -
                                          std::log2(missing))
                             : 0.0};
    return out;
}

DenseNumerics sparse_numerics(const NestedPair& pair, const Density& d,
                              std::int64_t h1, std::int64_t h2, double tail) {
    const std::int64_t M = pair.index();
    std::vector<MassFunction> conditionals;
    conditionals.reserve(M);
    for (int x = 0; x < M; ++x)
        conditionals.push_back(
            w_distribution(pair, d, h1, h2, x, std::nullopt, tail));
    std::vector<const MassFunction*> ptrs;
    for (const auto& c : conditionals) ptrs.push_back(&c);
    MassFunction marginal =
        mix(ptrs, std::vector<double>(M, 1.0 / static_cast<double>(M)));

    DenseNumerics out;
    out.per_message.resize(M);
    for (int x = 0; x < M; ++x) {
        out.per_message[x] = variational_distance(marginal, conditionals[x]);
        if (out.per_message[x].value > out.max_variational.value)
            out.max_variational = out.per_message[x];
        out.accumulated_tail =
            std::max(out.accumulated_tail, out.per_message[x].error);
    }
    out.leakage = mutual_information(
        std::vector<double>(M, 1.0 / static_cast<double>(M)), conditionals);
    return out;
}

} // namespace

SecrecyReport perfect_secrecy_audit(const NestedPair& pair, const Density& d,
                                    std::int64_t h1, std::int64_t h2,
                                    double tol, double tail_override) {
    if (d.kind != Density::Kind::Fejer)
        throw Error("the perfect-secrecy audit uses the Fejer family");
    if (pair.fine().dim() > 2)
        throw DimensionTooLarge("CompactPsi audits are limited to n <= 2");
    if (h1 == 0 || h2 == 0 || gcd64(h1, h2) != 1)
        throw NotCoprime("h1, h2 must be nonzero co-prime integers");

    SecrecyReport rep;
    rep.mode = "perfect";
    rep.dimension = pair.fine().dim();
    rep.group_size = pair.index();
    rep.h1 = h1;
    rep.h2 = h2;
    rep.tolerance = tol;

    rep.condition_holds =
        !order_divides_check(pair, h1) && !order_divides_check(pair, h2);
    rep.geometric_certificate =
        rep.condition_holds && psi_support_certificate(pair, d, h1, h2);

    double tail = (tail_override > 0) ? tail_override
                                      : std::min(1e-3, std::max(1e-12, tol / 10.0));
    DenseNumerics num = (pair.fine().dim() == 1)
                            ? dense_perfect_numerics(pair, d, h1, h2, tail)
                            : sparse_numerics(pair, d, h1, h2, tail);
    rep.per_message = num.per_message;
    rep.max_variational = num.max_variational;
    rep.leakage_bits = num.leakage;
    rep.accumulated_tail = num.accumulated_tail;

    double threshold = std::max(tol, 10.0 * rep.accumulated_tail);
    bool numerics_ok = rep.max_variational.value <= threshold;
    rep.numerics_agree = !(rep.geometric_certificate && !numerics_ok);
    rep.passed = rep.geometric_certificate && numerics_ok;
    if (rep.geometric_certificate) rep.bound_bits = 0.0;
    return rep;
}

SecrecyReport strong_secrecy_audit(const NestedPair& pair, const Density& d,
                                   std::int64_t h1, std::int64_t h2,
                                   double tail) {
    if (d.kind != Density::Kind::Gaussian)
        throw Error("the strong-secrecy audit uses the Gaussian family");
    if (pair.fine().dim() > 4)
        throw DimensionTooLarge("Gaussian audits are limited to n <= 4");
    if (h1 == 0 || h2 == 0 || gcd64(h1, h2) != 1)
        throw NotCoprime("h1, h2 must be nonzero co-prime integers");

    SecrecyReport rep;
    rep.mode = "strong";
    rep.dimension = pair.fine().dim();
    rep.group_size = pair.index();
    rep.h1 = h1;
    rep.h2 = h2;

    rep.condition_holds =
        !order_divides_check(pair, h1) && !order_divides_check(pair, h2);

    const double P = d.sigma * d.sigma;
    const double theta =
        std::sqrt(P / static_cast<double>(h1 * h1 + h2 * h2));
    rep.epsilon = flatness_factor(pair.coarse(), theta, FlatnessMethod::FourierSum);

    DenseNumerics num = sparse_numerics(pair, d, h1, h2, tail);
    rep.per_message = num.per_message;
    rep.max_variational = num.max_variational;
    rep.leakage_bits = num.leakage;
    rep.accumulated_tail = num.accumulated_tail;
    rep.tolerance = 16.0 * rep.epsilon;

    bool vd_ok = true;
    for (const auto& v : rep.per_message)
        vd_ok = vd_ok && (v.value <= 16.0 * rep.epsilon + v.error);
    bool mi_ok = true;
    if (rep.epsilon < kInv16e && rep.group_size > 4) {
        rep.bound_bits = strong_secrecy_bound(rep.epsilon, rep.group_size);
        mi_ok = rep.leakage_bits.value <= rep.bound_bits + rep.leakage_bits.error;
    }
    rep.numerics_agree = !(rep.condition_holds && !(vd_ok && mi_ok));
    rep.passed = rep.condition_holds && vd_ok && mi_ok;
    return rep;
}

} // namespace latticeguard
