#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "latticeguard/construction_a.hpp"
#include "latticeguard/relay.hpp"

using namespace latticeguard;

namespace {

Lattice z(int n, double scale = 1.0) {
    return make_lattice(Mat::Identity(n, n) * scale);
}

NestedPair z_pair(std::int64_t q) { return make_nested(z(1), z(1, double(q))); }

std::vector<CosetPMF> message_pmfs(const NestedPair& pair, const Density& d,
                                   double tail) {
    std::vector<CosetPMF> out;
    for (int m = 0; m < pair.index(); ++m)
        out.push_back(coset_pmf(d, pair.coarse(), pair.reps()[m].point, tail));
    return out;
}

} // namespace

TEST_CASE("reduce_gains") {
    auto r1 = reduce_gains(2.0, 3.0, 1000000, 1e-9);
    REQUIRE(r1.has_value());
    CHECK(r1->k1 == 2);
    CHECK(r1->k2 == 3);
    CHECK(r1->h == doctest::Approx(1.0).epsilon(1e-12));

    auto r2 = reduce_gains(1.5, 2.5, 1000000, 1e-9);
    REQUIRE(r2.has_value());
    CHECK(r2->k1 == 3);
    CHECK(r2->k2 == 5);
    CHECK(r2->h == doctest::Approx(0.5).epsilon(1e-12));

    auto r3 = reduce_gains(1.0, std::sqrt(2.0), 10000, 1e-12);
    CHECK(!r3.has_value()); // irrational ratio: no convergent qualifies

    CHECK_THROWS_AS(reduce_gains(0.0, 1.0, 100, 1e-9), ZeroGain);

    // scaling by a rational leaves (k1, k2) unchanged
    auto base = reduce_gains(2.0, 3.0, 1000000, 1e-9);
    for (double c : {0.5, 3.0, 1.0 / 3.0, 7.25}) {
        auto scaled = reduce_gains(c * 2.0, c * 3.0, 1000000, 1e-9);
        REQUIRE(scaled.has_value());
        CHECK(scaled->k1 == base->k1);
        CHECK(scaled->k2 == base->k2);
        CHECK(scaled->h == doctest::Approx(c * base->h).epsilon(1e-9));
    }

    // negative gains keep h k = h exact
    auto neg = reduce_gains(-2.0, 3.0, 1000000, 1e-9);
    REQUIRE(neg.has_value());
    CHECK(neg->h * double(neg->k1) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(neg->h * double(neg->k2) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(gcd64(neg->k1, neg->k2) == 1);
}

TEST_CASE("channel model invariants") {
    ChannelModel ch = make_channel(1.5, 2.5, 0.1);
    REQUIRE(ch.reduced.has_value());
    CHECK(std::fabs(ch.reduced->h * ch.reduced->k1 - 1.5) <= 1e-9);
    CHECK(std::fabs(ch.reduced->h * ch.reduced->k2 - 2.5) <= 1e-9);
    CHECK(gcd64(ch.reduced->k1, ch.reduced->k2) == 1);

    ChannelModel irr = make_channel(1.0, std::sqrt(2.0), 0.0);
    CHECK(!irr.reduced.has_value());
    CHECK_THROWS_AS(
        simulate_mac(z_pair(5), Density::gaussian(5.0), irr, 10, 1, 1e-6),
        NotReduced);
}

TEST_CASE("noiseless MAC decodes without error") {
    SUBCASE("Fejer on (Z,5Z) with gains (1,2)") {
        NestedPair pair = z_pair(5);
        ChannelModel ch = make_channel(1.0, 2.0, 0.0);
        MacReport rep = simulate_mac(pair, Density::fejer(0.4), ch, 10000, 42, 1e-6);
        CHECK(rep.errors == 0);
        CHECK(rep.order_condition_ok);
    }
    SUBCASE("Gaussian on a 2-dim Construction-A pair with gains (1,2)") {
        CodedPair cp = nested_pair_from_codes(make_linear_code(5, 2, {}),
                                              make_linear_code(5, 2, {{1, 2}}),
                                              1.0);
        ChannelModel ch = make_channel(1.0, 2.0, 0.0);
        MacReport rep = simulate_mac(cp.pair, Density::gaussian(7.0), ch, 10000,
                                     7, 1e-9);
        CHECK(rep.errors == 0);
    }
    SUBCASE("rational gains reduce and decode exactly") {
        NestedPair pair = z_pair(5);
        ChannelModel ch = make_channel(0.5, 1.0, 0.0); // h = 0.5, (1, 2)
        MacReport rep = simulate_mac(pair, Density::gaussian(9.0), ch, 5000, 3,
                                     1e-9);
        CHECK(rep.errors == 0);
    }
}

TEST_CASE("exhaustive message grid matches the group table") {
    NestedPair pair = z_pair(5);
    Density d = Density::gaussian(std::sqrt(30.0));
    auto pmfs = message_pmfs(pair, d, 1e-9);
    ChannelModel ch = make_channel(2.0, 3.0, 0.0);
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y)
            for (int draw = 0; draw < 4; ++draw) {
                Vec u = sample(pmfs[x], 1000 + draw, 1)[0];
                Vec v = sample(pmfs[y], 2000 + draw, 1)[0];
                Vec w = 2.0 * u + 3.0 * v;
                int label = pair.label_of(closest_point(pair.fine(), w).point);
                CHECK(label ==
                      pair.add(pair.scalar_mul(2, x), pair.scalar_mul(3, y)));
            }
}

TEST_CASE("trial records are reproducible bit-for-bit") {
    NestedPair pair = z_pair(5);
    auto pmfs = message_pmfs(pair, Density::gaussian(5.0), 1e-9);
    ChannelModel ch = make_channel(1.0, 2.0, 3.0);
    for (std::int64_t t = 0; t < 20; ++t) {
        TrialRecord a = simulate_one(pair, pmfs, ch, 99, t);
        TrialRecord b = simulate_one(pair, pmfs, ch, 99, t);
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
        CHECK(std::memcmp(a.w.data(), b.w.data(), sizeof(double)) == 0);
        CHECK(a.decoded == b.decoded);
        CHECK(a.correct == b.correct);
    }
    // different trial index gives a different stream
    TrialRecord a = simulate_one(pair, pmfs, ch, 99, 0);
    TrialRecord c = simulate_one(pair, pmfs, ch, 99, 1);
    CHECK((a.x != c.x || a.y != c.y || a.w[0] != c.w[0]));
}

TEST_CASE("error rate rises to chance level with noise") {
    NestedPair pair = z_pair(5);
    Density d = Density::gaussian(std::sqrt(125.0));
    const double P = 125.0;

    // monotone within 2 sigma of the Wilson interval across a noise sweep
    double prev_hi = -1.0;
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(P * std::pow(10.0, -2.0 + 0.5 * i));
    double prev_rate = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ChannelModel ch = make_channel(1.0, 2.0, grid[i]);
        MacReport rep = simulate_mac(pair, d, ch, 10000, 1234 + i, 1e-9);
        double slack = 2.0 * (rep.ci_high - rep.ci_low);
        CHECK(rep.error_rate >= prev_rate - slack);
        prev_rate = rep.error_rate;
        prev_hi = rep.ci_high;
    }
    CHECK(prev_hi > 0.0);

    // chance level 1 - 1/M at overwhelming noise
    ChannelModel loud = make_channel(1.0, 2.0, 100.0 * P);
    MacReport rep = simulate_mac(pair, d, loud, 20000, 4321, 1e-9);
    CHECK(rep.error_rate > 0.8 - 3.0 * (rep.ci_high - rep.ci_low));
    CHECK(rep.error_rate < 0.8 + 3.0 * (rep.ci_high - rep.ci_low));
}

TEST_CASE("eavesdropper with irrational gains") {
    SUBCASE("unique recovery example on Z^2") {
        Lattice L = z(2);
        CoeffVec cu(2), cv(2);
        cu << 1, 2;
        cv << 3, -1;
        Vec w = L.point_from_coeffs(cu) + std::sqrt(2.0) * L.point_from_coeffs(cv);
        EavesdropResult res = eavesdrop_irrational(L, 1.0, std::sqrt(2.0), w, 10);
        REQUIRE(res.unique);
        CHECK(res.solutions[0].first == cu);
        CHECK(res.solutions[0].second == cv);
    }
    SUBCASE("rational gains are ambiguous") {
        Vec w(1);
        w << 12.0;
        EavesdropResult res = eavesdrop_irrational(z(1), 2.0, 3.0, w, 10);
        CHECK(!res.unique);
        CHECK(res.solution_count > 1);
    }
    SUBCASE("zero observation is the zero pair") {
        EavesdropResult res =
            eavesdrop_irrational(z(1), 1.0, std::sqrt(2.0), Vec::Zero(1), 10);
        REQUIRE(res.unique);
        CHECK(res.solutions[0].first[0] == 0);
        CHECK(res.solutions[0].second[0] == 0);
    }
    SUBCASE("100 random pairs are unique for sqrt2, sqrt3, pi") {
        Lattice L = z(2);
        std::mt19937_64 rng(5);
        for (double ratio : {std::sqrt(2.0), std::sqrt(3.0), M_PI}) {
            int unique = 0;
            for (int t = 0; t < 100; ++t) {
                CoeffVec cu(2), cv(2);
                for (int i = 0; i < 2; ++i) {
                    cu[i] = std::int64_t(rng() % 21) - 10;
                    cv[i] = std::int64_t(rng() % 21) - 10;
                }
                Vec w = L.point_from_coeffs(cu) + ratio * L.point_from_coeffs(cv);
                EavesdropResult res = eavesdrop_irrational(L, 1.0, ratio, w, 10);
                if (res.unique && res.solutions[0].first == cu &&
                    res.solutions[0].second == cv)
                    ++unique;
            }
            CHECK(unique == 100);
        }
    }
    SUBCASE("matches a brute-force double loop on a small box") {
        Lattice L = z(1);
        std::mt19937_64 rng(8);
        for (int t = 0; t < 25; ++t) {
            double h2 = std::sqrt(2.0);
            std::int64_t au = std::int64_t(rng() % 7) - 3;
            std::int64_t av = std::int64_t(rng() % 7) - 3;
            Vec w(1);
            w << double(au) + h2 * double(av);
            EavesdropResult res = eavesdrop_irrational(L, 1.0, h2, w, 3);
            std::int64_t count = 0;
            for (std::int64_t uu = -3; uu <= 3; ++uu)
                for (std::int64_t vv = -3; vv <= 3; ++vv)
                    if (std::fabs(double(uu) + h2 * double(vv) - w[0]) <= 1e-6)
                        ++count;
            CHECK(res.solution_count == count);
        }
    }
}

TEST_CASE("rate calculators") {
    // rate_perfect(0.9, SNR=100): 0.5 log2 81 - log2(2e)
    RateResult rp = rate_perfect(0.9, 100.0, 1.0);
    long double oracle =
        0.5L * std::log2(81.0L) - (1.0L + std::log2((long double)M_E));
    CHECK(std::fabs(rp.bits - double(oracle)) < 1e-9);
    CHECK(rp.bits == doctest::Approx(0.727).epsilon(1e-3));
    CHECK(!rp.infeasible);

    // strong - perfect gap = 1 + 0.5 log2 e for equal arguments
    for (double alpha : {0.5, 0.9}) {
        for (double snr : {10.0, 100.0, 1000.0}) {
            double gap = rate_strong(alpha, snr, 1.0).bits -
                         rate_perfect(alpha, snr, 1.0).bits;
            CHECK(std::fabs(gap - (1.0 + 0.5 * std::log2(M_E))) < 1e-12);
        }
    }

    // degenerate jamming: matching logs cancel to the -0.5 log2 e penalty
    {
        // choose parameters with 2 delta^2 P + nsvar = h2^2 P + nsvar1
        double P = 10.0, delta = 1.0, nsvar = 1.0;
        double h2 = std::sqrt(2.0), nsvar1 = 1.0;
        RateResult rj = rate_jamming(1.0, h2, P, delta, nsvar, nsvar1);
        CHECK(rj.bits == doctest::Approx(-0.5 * std::log2(M_E)).epsilon(1e-12));
        CHECK(rj.infeasible);
    }

    // negative rates are reported, not clamped
    RateResult low = rate_perfect(0.9, 10.0, 1.0);
    CHECK(low.bits < 0.0);
    CHECK(low.infeasible);
}

TEST_CASE("feasibility thresholds decide boundary probes exactly") {
    CHECK(feasibility(0.6, 1, 2, SecrecyMode::Perfect));   // 2/3 > 0.6
    CHECK(!feasibility(0.7, 1, 2, SecrecyMode::Perfect));  // 2/3 < 0.7
    CHECK(feasibility(0.44, 1, 2, SecrecyMode::Strong));   // 1/sqrt5 >= 0.44
    CHECK(!feasibility(0.45, 1, 2, SecrecyMode::Strong));

    // boundary: alpha = fl(sqrt(1/5)) has alpha^2 * 5 <= 1 in doubles
    double boundary = std::sqrt(0.2);
    CHECK(feasibility(boundary, 1, 2, SecrecyMode::Strong) ==
          (1.0 >= boundary * boundary * 5.0));
    // equality case for the strict perfect inequality: alpha = 2/3
    double a23 = 2.0 / 3.0;
    CHECK(feasibility(a23, 1, 2, SecrecyMode::Perfect) == (2.0 > a23 * 3.0));

    CHECK_THROWS_AS(feasibility(0.5, 2, 4, SecrecyMode::Perfect), NotCoprime);
    CHECK_THROWS_AS(feasibility(1.5, 1, 2, SecrecyMode::Perfect), Error);
}

TEST_CASE("wilson interval sanity") {
    double lo, hi;
    wilson_interval(0, 10000, lo, hi);
    CHECK(lo == 0.0);
    CHECK(hi < 1e-3);
    wilson_interval(8000, 10000, lo, hi);
    CHECK(lo < 0.8);
    CHECK(hi > 0.8);
}
