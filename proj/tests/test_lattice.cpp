#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "latticeguard/construction_a.hpp"
#include "latticeguard/lattice.hpp"

using namespace latticeguard;

namespace {

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Vec vec1(double x) {
    Vec v(1);
    v << x;
    return v;
}

Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

Lattice z(int n, double scale = 1.0) {
    return make_lattice(Mat::Identity(n, n) * scale);
}

// well-conditioned random basis near a rotation of the identity
Lattice random_lattice(std::uint64_t seed, int n, double spread = 0.4) {
    std::mt19937_64 rng(seed);
    auto u = [&]() { return (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
    while (true) {
        Mat m = Mat::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) += spread * u();
        if (std::fabs(m.determinant()) > 0.3) return make_lattice(m);
    }
}

// oracle: all lattice points with coefficients in [-K, K]^n within radius of
// center, using the same closed-ball slack as the library
std::vector<CoeffVec> brute_ball(const Lattice& L, const Vec& center,
                                 double radius, int K) {
    std::vector<CoeffVec> out;
    const int n = L.dim();
    std::vector<std::int64_t> idx(n, -K);
    CoeffVec c(n);
    while (true) {
        for (int i = 0; i < n; ++i) c[i] = idx[i];
        if ((L.point_from_coeffs(c) - center).norm() <= radius + 1e-9)
            out.push_back(c);
        int i = 0;
        for (; i < n; ++i) {
            if (++idx[i] <= K) break;
            idx[i] = -K;
        }
        if (i == n) break;
    }
    return out;
}

bool lex_less(const CoeffVec& a, const CoeffVec& b) {
    for (int i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

} // namespace

TEST_CASE("make_lattice basics") {
    Lattice l1 = z(2);
    CHECK(l1.cell_volume() == doctest::Approx(1.0).epsilon(1e-12));

    Lattice l2 = make_lattice(mat2(2, 0, 1, 1));
    CHECK(l2.cell_volume() == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_lattice(mat2(1, 2, 2, 4)), SingularGenerator);
}

TEST_CASE("fourier dual") {
    for (int n : {1, 2, 3}) {
        Lattice d = fourier_dual(z(n));
        CHECK((d.generator() - 2 * M_PI * Mat::Identity(n, n)).norm() < 1e-12);
    }
    Lattice d5 = fourier_dual(z(1, 5.0));
    CHECK(d5.generator()(0, 0) == doctest::Approx(2 * M_PI / 5).epsilon(1e-14));

    // double dual has the same point set
    Lattice L = random_lattice(11, 2);
    Lattice dd = fourier_dual(fourier_dual(L));
    for (int i = 0; i < 2; ++i) {
        CHECK(L.contains(dd.generator().row(i).transpose(), 1e-8));
        CHECK(dd.contains(L.generator().row(i).transpose(), 1e-8));
    }

    // <x, y> in 2 pi Z for dual and primal points
    Lattice dual = fourier_dual(L);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 1000; ++t) {
        CoeffVec a(2), b(2);
        for (int i = 0; i < 2; ++i) {
            a[i] = std::int64_t(rng() % 21) - 10;
            b[i] = std::int64_t(rng() % 21) - 10;
        }
        double ip = dual.point_from_coeffs(a).dot(L.point_from_coeffs(b));
        double m = ip / (2 * M_PI);
        CHECK(std::fabs(m - std::round(m)) < 1e-9);
    }
}

TEST_CASE("closest point examples and tie rule") {
    LatticePoint p = closest_point(z(2), vec2(0.3, -0.6));
    CHECK(p.point[0] == doctest::Approx(0.0));
    CHECK(p.point[1] == doctest::Approx(-1.0));

    // tie at 0.5 resolves to the lexicographically smaller coefficient
    LatticePoint t = closest_point(z(1), vec1(0.5));
    CHECK(t.coeffs[0] == 0);
    LatticePoint t2 = closest_point(z(1), vec1(-0.5));
    CHECK(t2.coeffs[0] == -1);
}

TEST_CASE("closest point matches brute force on a random 3-dim lattice") {
    Lattice L = random_lattice(3, 3);
    std::mt19937_64 rng(17);
    auto u = [&]() { return (double(rng() >> 11) * 0x1.0p-53) * 4.0 - 2.0; };
    for (int t = 0; t < 100; ++t) {
        Vec w(3);
        w << u(), u(), u();
        LatticePoint got = closest_point(L, w);

        double best = 1e300;
        CoeffVec bc(3);
        for (std::int64_t a = -20; a <= 20; ++a)
            for (std::int64_t b = -20; b <= 20; ++b)
                for (std::int64_t c = -20; c <= 20; ++c) {
                    CoeffVec cc(3);
                    cc << a, b, c;
                    double d = (L.point_from_coeffs(cc) - w).norm();
                    if (d < best - 1e-9 ||
                        (std::fabs(d - best) <= 1e-9 && lex_less(cc, bc))) {
                        best = d;
                        bc = cc;
                    }
                }
        CHECK((got.point - w).norm() == doctest::Approx(best).epsilon(1e-12));
        CHECK(got.coeffs == bc);
    }
}

TEST_CASE("enumerate_ball equals the brute-force box oracle") {
    Lattice L = random_lattice(5, 2);
    Vec c = vec2(0.37, -0.85);
    double rho = 3.0;
    auto got = enumerate_ball(L, c, rho);
    auto want = brute_ball(L, c, rho, 25);
    REQUIRE(got.size() == want.size());
    std::set<std::pair<std::int64_t, std::int64_t>> sa, sb;
    for (const auto& p : got) sa.insert({p.coeffs[0], p.coeffs[1]});
    for (const auto& k : want) sb.insert({k[0], k[1]});
    CHECK(sa == sb);

    // CVP optimality against every enumerated point
    LatticePoint cp = closest_point(L, c);
    for (const auto& p : got)
        CHECK((cp.point - c).norm() <= (p.point - c).norm() + 1e-12);
}

TEST_CASE("packing radius") {
    for (int n : {1, 2, 4}) CHECK(packing_radius(z(n)) == doctest::Approx(0.5));
    CHECK(packing_radius(fourier_dual(z(1, 5.0))) ==
          doctest::Approx(M_PI / 5).epsilon(1e-14));

    LinearCode code = make_linear_code(5, 2, {{1, 2}});
    Lattice ca = construction_a(code, 1.0);
    // brute-force shortest vector over a box
    double best = 1e300;
    for (const auto& c : brute_ball(ca, Vec::Zero(2), 6.0, 12)) {
        if (c[0] == 0 && c[1] == 0) continue;
        best = std::min(best, ca.point_from_coeffs(c).norm());
    }
    CHECK(packing_radius(ca) == doctest::Approx(best / 2).epsilon(1e-12));
}

TEST_CASE("nested pair (Z, 5Z)") {
    NestedPair pair = make_nested(z(1), z(1, 5.0));
    CHECK(pair.index() == 5);
    std::vector<double> reps;
    for (const auto& r : pair.reps()) reps.push_back(r.point[0]);
    std::sort(reps.begin(), reps.end());
    CHECK(reps == std::vector<double>{-2, -1, 0, 1, 2});

    // group is cyclic of order 5
    for (int a = 0; a < 5; ++a) {
        CHECK(pair.add(a, pair.zero()) == a);
        bool has_inverse = false;
        for (int b = 0; b < 5; ++b)
            if (pair.add(a, b) == pair.zero()) has_inverse = true;
        CHECK(has_inverse);
        if (a != pair.zero()) CHECK(pair.element_order(a) == 5);
    }

    // closure and commutativity against brute-force reduction
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            CHECK(pair.add(a, b) == pair.add(b, a));
            Vec sum = pair.reps()[a].point + pair.reps()[b].point;
            CHECK(pair.add(a, b) == pair.label_of(sum));
        }
}

TEST_CASE("nested pair edge cases") {
    NestedPair trivial = make_nested(z(2), z(2));
    CHECK(trivial.index() == 1);

    CHECK_THROWS_AS(make_nested(z(1, 3.0), z(1)), NotNested);
}

TEST_CASE("quotient duality: dual pair has the same order multiset") {
    std::vector<std::pair<Lattice, Lattice>> fixtures;
    fixtures.emplace_back(z(1), z(1, 5.0));
    Mat d24(2, 2);
    d24 << 2, 0, 0, 4;
    fixtures.emplace_back(z(2), make_lattice(d24)); // Z2 x Z4, non-elementary
    Lattice rl = random_lattice(23, 2);
    fixtures.emplace_back(rl, scale_lattice(rl, 3.0));

    for (const auto& [fine, coarse] : fixtures) {
        NestedPair pair = make_nested(fine, coarse);
        NestedPair dual_pair =
            make_nested(fourier_dual(coarse), fourier_dual(fine));
        CHECK(pair.index() == dual_pair.index());
        CHECK(pair.order_multiset() == dual_pair.order_multiset());
    }
}

TEST_CASE("combine_coprime_check") {
    CHECK(combine_coprime_check(z(1), 2, 3, 50.0));
    CHECK_THROWS_AS(combine_coprime_check(z(1), 2, 4, 10.0), NotCoprime);
    CHECK(combine_coprime_check(random_lattice(31, 2), 3, 5, 10.0));

    // exhaustive pair-search oracle on Z: every |w| <= 20 is k1 u + k2 v with
    // u in the Bezout ball
    std::int64_t k1 = 2, k2 = 3, a = -1, b = 1; // -1*2 + 1*3 = 1
    REQUIRE(a * k1 + b * k2 == 1);
    for (std::int64_t w = -20; w <= 20; ++w) {
        bool found = false;
        for (std::int64_t u = -std::llabs(a) * 20; u <= std::llabs(a) * 20 && !found; ++u) {
            if ((w - k1 * u) % k2 == 0) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("coset_intersection") {
    SUBCASE("disjoint when the shift difference is off-lattice") {
        auto r = coset_intersection(z(1), 2, 3, vec1(0), vec1(0.5), 30.0);
        CHECK(r.empty);
    }
    SUBCASE("2Z cap (3Z + 1) = 6Z + 4") {
        auto r = coset_intersection(z(1), 2, 3, vec1(0), vec1(1), 100.0);
        REQUIRE(!r.empty);
        // shift is some member of 6Z + 4
        double m = (r.shift[0] - 4.0) / 6.0;
        CHECK(std::fabs(m - std::round(m)) < 1e-9);
        // brute-force oracle over the window
        std::set<long long> want;
        for (long long x = -100; x <= 100; ++x)
            if (x % 2 == 0 && ((x - 1) % 3 + 3) % 3 == 0) want.insert(x);
        std::set<long long> got;
        for (const auto& p : r.points) got.insert(std::llround(p[0]));
        CHECK(got == want);
    }
    SUBCASE("degenerate k1 = 1 gives k2 Z") {
        auto r = coset_intersection(z(1), 1, 7, vec1(0), vec1(0), 50.0);
        REQUIRE(!r.empty);
        for (const auto& p : r.points) {
            double m = p[0] / 7.0;
            CHECK(std::fabs(m - std::round(m)) < 1e-9);
        }
        CHECK(r.points.size() == 15); // multiples of 7 within +-50
    }
    SUBCASE("random 2-dim lattice vs direct search") {
        Lattice L = random_lattice(41, 2);
        Vec w1 = L.point_from_coeffs((CoeffVec(2) << 1, -2).finished());
        Vec w2 = L.point_from_coeffs((CoeffVec(2) << 0, 3).finished());
        auto r = coset_intersection(L, 3, 4, w1, w2, 8.0);
        REQUIRE(!r.empty); // w2 - w1 is a lattice point
        CHECK(!r.points.empty());
        for (const auto& p : r.points) {
            Lattice l1 = integer_multiple(L, 3), l2 = integer_multiple(L, 4);
            CHECK(l1.contains(p - w1, 1e-7));
            CHECK(l2.contains(p - w2, 1e-7));
        }
    }
}

TEST_CASE("set-algebra lemmas over all coprime pairs up to 7") {
    std::vector<Lattice> lats;
    lats.push_back(z(1));
    lats.push_back(z(1, 2.0));
    lats.push_back(random_lattice(51, 2));
    lats.push_back(random_lattice(52, 2));

    for (const auto& L : lats) {
        double rho = (L.dim() == 1) ? 30.0 : 8.0;
        for (std::int64_t k1 = 1; k1 <= 7; ++k1)
            for (std::int64_t k2 = 1; k2 <= 7; ++k2) {
                if (gcd64(k1, k2) != 1) continue;
                CHECK(combine_coprime_check(L, k1, k2, rho));
                // Lemma 4 with on-lattice shifts
                Vec w1 = Vec::Zero(L.dim());
                Vec w2 = L.generator().row(0).transpose();
                auto r = coset_intersection(L, k1, k2, w1, w2, rho);
                CHECK(!r.empty);
            }
    }
}
