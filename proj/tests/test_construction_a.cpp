#include <doctest.h>

#include <cmath>
#include <set>

#include "latticeguard/construction_a.hpp"

using namespace latticeguard;

namespace {

Lattice z(int n, double scale = 1.0) {
    return make_lattice(Mat::Identity(n, n) * scale);
}

// membership of an integer vector in scale*(C + q Z^n)
bool in_code_lattice(const LinearCode& code, double scale, const Vec& p) {
    const std::int64_t q = code.q;
    std::vector<std::int64_t> v(code.n);
    for (int i = 0; i < code.n; ++i) {
        double x = p[i] / scale;
        if (std::fabs(x - std::round(x)) > 1e-9) return false;
        v[i] = ((std::int64_t(std::llround(x)) % q) + q) % q;
    }
    // exhaustive span of the (reduced) generators
    int m = code.dimension;
    std::int64_t total = 1;
    for (int i = 0; i < m; ++i) total *= q;
    for (std::int64_t r = 0; r < total; ++r) {
        std::int64_t t = r;
        std::vector<std::int64_t> cw(code.n, 0);
        for (int i = 0; i < m; ++i) {
            std::int64_t ci = t % q;
            t /= q;
            for (int j = 0; j < code.n; ++j)
                cw[j] = (cw[j] + ci * code.generators[i][j]) % q;
        }
        bool same = true;
        for (int j = 0; j < code.n; ++j)
            if (cw[j] != v[j]) same = false;
        if (same) return true;
    }
    return false;
}

} // namespace

TEST_CASE("prime validation") {
    CHECK(is_prime(2));
    CHECK(is_prime(7));
    CHECK(!is_prime(1));
    CHECK(!is_prime(4));
    CHECK_THROWS_AS(make_linear_code(6, 2, {}), Error);
}

TEST_CASE("construction A special cases") {
    // full code gives scale * Z^n
    LinearCode full = make_linear_code(5, 2, {{1, 0}, {0, 1}});
    Lattice lf = construction_a(full, 2.0);
    CHECK(lf.cell_volume() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(lf.contains((Vec(2) << 2, -4).finished(), 1e-9));
    CHECK(!lf.contains((Vec(2) << 1, 0).finished(), 1e-9));

    // zero code gives scale * q Z^n
    LinearCode zero = make_linear_code(5, 2, {});
    Lattice lz = construction_a(zero, 1.0);
    CHECK(lz.cell_volume() == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(lz.contains((Vec(2) << 5, -10).finished(), 1e-9));
    CHECK(!lz.contains((Vec(2) << 1, 0).finished(), 1e-9));
}

TEST_CASE("construction A point-set oracle for q=5, C=span{(1,2)}") {
    LinearCode code = make_linear_code(5, 2, {{1, 2}});
    Lattice ca = construction_a(code, 1.0);
    CHECK(ca.cell_volume() == doctest::Approx(5.0).epsilon(1e-12));

    // every integer vector in a window is in the lattice iff it reduces to a
    // codeword mod q
    for (int a = -7; a <= 7; ++a)
        for (int b = -7; b <= 7; ++b) {
            Vec p = (Vec(2) << a, b).finished();
            CHECK(ca.contains(p, 1e-9) == in_code_lattice(code, 1.0, p));
        }

    // index 5 inside Z^2 relative to 5 Z^2
    NestedPair pair =
        make_nested(ca, construction_a(make_linear_code(5, 2, {}), 1.0));
    CHECK(pair.index() == 5);
}

TEST_CASE("construction A is invariant under generator changes") {
    LinearCode a = make_linear_code(7, 3, {{1, 2, 3}, {0, 1, 5}});
    // row operations: swap, scale by units, add multiples
    LinearCode b = make_linear_code(7, 3, {{0, 3, 15}, {2, 4, 6}, {1, 3, 1}});
    REQUIRE(a.dimension == b.dimension);
    Lattice la = construction_a(a, 1.0);
    Lattice lb = construction_a(b, 1.0);
    for (int x = -4; x <= 4; ++x)
        for (int y = -4; y <= 4; ++y)
            for (int w = -4; w <= 4; ++w) {
                Vec p = (Vec(3) << x, y, w).finished();
                CHECK(la.contains(p, 1e-9) == lb.contains(p, 1e-9));
            }
}

TEST_CASE("nested pair from codes") {
    LinearCode c = make_linear_code(5, 2, {{1, 2}});
    LinearCode c0 = make_linear_code(5, 2, {});
    CodedPair cp = nested_pair_from_codes(c0, c, 1.0);
    CHECK(cp.pair.index() == 5);
    CHECK(cp.space.size() == 5);
    CHECK(cp.space.m() == 1);

    CodedPair degenerate = nested_pair_from_codes(c, c, 1.0);
    CHECK(degenerate.pair.index() == 1);
    CHECK(degenerate.space.m() == 0);

    LinearCode other = make_linear_code(5, 2, {{1, 3}});
    CHECK_THROWS_AS(nested_pair_from_codes(other, c, 1.0), NotSubcode);
}

TEST_CASE("order_divides_check on a prime-index pair") {
    CodedPair cp = nested_pair_from_codes(make_linear_code(5, 1, {}),
                                          make_linear_code(5, 1, {{1}}), 1.0);
    CHECK(!order_divides_check(cp.pair, 2)); // 5 does not divide 2
    CHECK(order_divides_check(cp.pair, 5));
    CHECK(order_divides_check(cp.pair, 10));
    CHECK(!order_divides_check(cp.pair, -3));
    CHECK(order_divides_check(cp.pair, -5));

    // matches q | k for several primes
    for (std::int64_t q : {2, 3, 7}) {
        CodedPair p2 = nested_pair_from_codes(
            make_linear_code(q, 1, {}), make_linear_code(q, 1, {{1}}), 1.0);
        for (std::int64_t k = 1; k <= 3 * q; ++k)
            CHECK(order_divides_check(p2.pair, k) == (k % q == 0));
    }
}

TEST_CASE("non-elementary quotient group Z2 x Z4") {
    Mat d24(2, 2);
    d24 << 2, 0, 0, 4;
    NestedPair pair = make_nested(z(2), make_lattice(d24));
    CHECK(pair.index() == 8);
    auto orders = pair.order_multiset();
    // Z2 x Z4 has orders {1, 2, 2, 2, 4, 4, 4, 4}
    CHECK(orders == std::vector<std::int64_t>{1, 2, 2, 2, 4, 4, 4, 4});
    CHECK(order_divides_check(pair, 2));
    CHECK(!order_divides_check(pair, 3));
}

TEST_CASE("message space is a bijection and a homomorphism") {
    struct Fx {
        std::int64_t q;
        int n;
        std::vector<FqVec> c, c0;
    };
    std::vector<Fx> fixtures = {
        {5, 2, {{1, 2}}, {}},
        {3, 2, {{1, 0}, {0, 1}}, {}},
        {7, 2, {{1, 3}}, {}},
        {2, 3, {{1, 0, 1}, {0, 1, 1}}, {}},
        {5, 2, {{1, 0}, {0, 1}}, {{1, 2}}},
    };
    for (const auto& fx : fixtures) {
        CodedPair cp = nested_pair_from_codes(
            make_linear_code(fx.q, fx.n, fx.c0),
            make_linear_code(fx.q, fx.n, fx.c), 1.0);
        const auto& space = cp.space;
        const auto& pair = cp.pair;
        REQUIRE(space.size() == pair.index());
        REQUIRE(space.size() <= 10000);

        // encode/decode are mutually inverse on all messages
        std::set<int> labels;
        for (std::int64_t r = 0; r < space.size(); ++r) {
            FqVec msg = space.unrank(r);
            int label = space.encode(pair, msg);
            labels.insert(label);
            CHECK(space.decode(pair, label) == msg);
        }
        CHECK(labels.size() == static_cast<std::size_t>(space.size()));

        // group isomorphism: rep(a (+) b) = rep(a) + rep(b) mod coarse
        for (std::int64_t ra = 0; ra < space.size(); ++ra)
            for (std::int64_t rb = 0; rb < space.size(); ++rb) {
                FqVec a = space.unrank(ra), b = space.unrank(rb);
                int la = space.encode(pair, a);
                int lb = space.encode(pair, b);
                int lsum = space.encode(pair, space.msg_add(a, b));
                CHECK(lsum == pair.add(la, lb));
            }
    }
}

TEST_CASE("recover_message") {
    CodedPair cp = nested_pair_from_codes(make_linear_code(5, 1, {}),
                                          make_linear_code(5, 1, {{1}}), 1.0);
    const auto& space = cp.space;

    // s = 1*x (+) 2*y with x=(3), y=(4): s=(1); recover y from s, x
    FqVec x{3}, y{4};
    FqVec s = space.msg_add(space.msg_scale(1, x), space.msg_scale(2, y));
    CHECK(s == FqVec{1});
    CHECK(recover_message(s, x, 1, 2, space) == y);
    // and x from s, y
    CHECK(recover_message(s, y, 2, 1, space) == x);

    // identity combination
    FqVec zero{0};
    CHECK(recover_message(s, zero, 1, 1, space) == s);

    CHECK_THROWS_AS(recover_message(s, x, 1, 5, space), NonInvertible);

    // modular-arithmetic oracle across all message pairs and unit gains
    for (std::int64_t k1 = 1; k1 <= 4; ++k1)
        for (std::int64_t k2 = 1; k2 <= 4; ++k2)
            for (std::int64_t xv = 0; xv < 5; ++xv)
                for (std::int64_t yv = 0; yv < 5; ++yv) {
                    FqVec xx{xv}, yy{yv};
                    FqVec ss = space.msg_add(space.msg_scale(k1, xx),
                                             space.msg_scale(k2, yy));
                    CHECK(recover_message(ss, xx, k1, k2, space) == yy);
                }
}
