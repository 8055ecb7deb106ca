#include "latticeguard/construction_a.hpp"

#include <algorithm>
#include <cmath>

namespace latticeguard {

namespace {

std::int64_t mod_pos(std::int64_t a, std::int64_t q) {
    std::int64_t r = a % q;
    return (r < 0) ? r + q : r;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t q) {
    std::int64_t x = 0, y = 0;
    std::int64_t g = extended_gcd(mod_pos(a, q), q, x, y);
    if (g != 1) throw NonInvertible("element has no inverse mod q");
    return mod_pos(x, q);
}

// Reduce w against rows with known pivots (rows have pivot entry 1).
// Returns the coefficients used, leaves the residual in w.
std::vector<std::int64_t> reduce_against(FqVec& w,
                                         const std::vector<FqVec>& rows,
                                         const std::vector<int>& pivots,
                                         std::int64_t q) {
    std::vector<std::int64_t> coefs(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::int64_t c = w[pivots[i]];
        if (c == 0) continue;
        coefs[i] = c;
        for (std::size_t j = 0; j < w.size(); ++j)
            w[j] = mod_pos(w[j] - c * rows[i][j], q);
    }
    return coefs;
}

} // namespace

bool is_prime(std::int64_t q) {
    if (q < 2) return false;
    for (std::int64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

LinearCode make_linear_code(std::int64_t q, int n,
                            const std::vector<FqVec>& generators) {
    if (!is_prime(q)) throw Error("q must be prime");
    if (n <= 0) throw Error("code length must be positive");
    LinearCode code;
    code.q = q;
    code.n = n;
    // Gaussian elimination to row-echelon form with unit pivots.
    std::vector<FqVec> rows;
    std::vector<int> pivots;
    for (const auto& g : generators) {
        if (static_cast<int>(g.size()) != n)
            throw Error("generator length does not match code length");
        FqVec w(n);
        for (int j = 0; j < n; ++j) w[j] = mod_pos(g[j], q);
        reduce_against(w, rows, pivots, q);
        int p = -1;
        for (int j = 0; j < n; ++j)
            if (w[j] != 0) { p = j; break; }
        if (p < 0) continue; // dependent row
        std::int64_t inv = mod_inverse(w[p], q);
        for (int j = 0; j < n; ++j) w[j] = mod_pos(w[j] * inv, q);
        rows.push_back(w);
        pivots.push_back(p);
    }
    // Keep rows sorted by pivot column for a canonical basis.
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pivots[a] < pivots[b]; });
    for (std::size_t i : order) code.generators.push_back(rows[i]);
    code.dimension = static_cast<int>(code.generators.size());
    return code;
}

bool is_subcode(const LinearCode& sub, const LinearCode& super) {
    if (sub.q != super.q || sub.n != super.n) return false;
    std::vector<int> pivots;
    for (const auto& r : super.generators) {
        for (int j = 0; j < super.n; ++j)
            if (r[j] != 0) { pivots.push_back(j); break; }
    }
    for (const auto& g : sub.generators) {
        FqVec w = g;
        reduce_against(w, super.generators, pivots, super.q);
        for (int j = 0; j < super.n; ++j)
            if (w[j] != 0) return false;
    }
    return true;
}

std::vector<std::vector<std::int64_t>> hnf_rows(
    std::vector<std::vector<std::int64_t>> rows, int n) {
    int r = 0; // next pivot row
    for (int col = 0; col < n && r < static_cast<int>(rows.size()); ++col) {
        // Euclid on the column entries below the current pivot row.
        while (true) {
            int best = -1;
            for (int i = r; i < static_cast<int>(rows.size()); ++i) {
                if (rows[i][col] == 0) continue;
                if (best < 0 ||
                    std::llabs(rows[i][col]) < std::llabs(rows[best][col]))
                    best = i;
            }
            if (best < 0) break;
            std::swap(rows[r], rows[best]);
            bool done = true;
            for (int i = r + 1; i < static_cast<int>(rows.size()); ++i) {
                if (rows[i][col] == 0) continue;
                std::int64_t f = rows[i][col] / rows[r][col];
                for (int j = 0; j < n; ++j) rows[i][j] -= f * rows[r][j];
                if (rows[i][col] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[r][col] != 0) {
            if (rows[r][col] < 0)
                for (int j = 0; j < n; ++j) rows[r][j] = -rows[r][j];
            ++r;
        }
    }
    if (r != n) throw Error("HNF reduction produced a rank-deficient basis");
    rows.resize(n);
    // Reduce entries above each pivot to the canonical range [0, pivot).
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            std::int64_t p = rows[j][j];
            std::int64_t f = rows[i][j] / p;
            if (rows[i][j] - f * p < 0) f -= 1;
            if (f != 0)
                for (int k = 0; k < n; ++k) rows[i][k] -= f * rows[j][k];
        }
    }
    return rows;
}

Lattice construction_a(const LinearCode& code, double scale) {
    if (scale <= 0 || !std::isfinite(scale))
        throw Error("scale must be positive and finite");
    const int n = code.n;
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& g : code.generators) rows.push_back(g);
    for (int i = 0; i < n; ++i) {
        std::vector<std::int64_t> e(n, 0);
        e[i] = code.q;
        rows.push_back(e);
    }
    auto h = hnf_rows(std::move(rows), n);
    Mat gen(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            gen(i, j) = scale * static_cast<double>(h[i][j]);
    return Lattice(gen);
}

MessageSpace::MessageSpace(LinearCode c0, LinearCode c, double scale,
                           const NestedPair& pair)
    : q_(c.q), n_(c.n), scale_(scale) {
    m_ = c.dimension - c0.dimension;
    if (m_ < 0) throw NotSubcode("c0 has larger dimension than c");
    size_ = 1;
    for (int i = 0; i < m_; ++i) size_ *= q_;
    if (size_ != pair.index())
        throw Error("message space size does not match the quotient index");

    c0_basis_ = c0.generators;
    for (const auto& r : c0_basis_) {
        for (int j = 0; j < n_; ++j)
            if (r[j] != 0) { c0_pivots_.push_back(j); break; }
    }
    // Extend the basis of C0 to a basis of C; the added rows index C/C0.
    for (const auto& g : c.generators) {
        FqVec w = g;
        reduce_against(w, c0_basis_, c0_pivots_, q_);
        reduce_against(w, coset_basis_, coset_pivots_, q_);
        int p = -1;
        for (int j = 0; j < n_; ++j)
            if (w[j] != 0) { p = j; break; }
        if (p < 0) continue;
        std::int64_t inv = mod_inverse(w[p], q_);
        for (int j = 0; j < n_; ++j) w[j] = mod_pos(w[j] * inv, q_);
        coset_basis_.push_back(w);
        coset_pivots_.push_back(p);
    }
    if (static_cast<int>(coset_basis_.size()) != m_)
        throw Error("coset basis extension failed");
}

FqVec MessageSpace::codeword_of(const FqVec& msg) const {
    FqVec cw(n_, 0);
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < n_; ++j)
            cw[j] = mod_pos(cw[j] + msg[i] * coset_basis_[i][j], q_);
    return cw;
}

FqVec MessageSpace::message_of_codeword(const FqVec& cw) const {
    FqVec w = cw;
    // Strip the C0 component first: coset rows carry zeros at the C0 pivots,
    // so the remaining forward elimination recovers the coset coordinates.
    reduce_against(w, c0_basis_, c0_pivots_, q_);
    std::vector<std::int64_t> coefs =
        reduce_against(w, coset_basis_, coset_pivots_, q_);
    for (int j = 0; j < n_; ++j)
        if (w[j] != 0) throw Error("vector is not a codeword of C");
    return coefs;
}

int MessageSpace::encode(const NestedPair& pair, const FqVec& msg) const {
    if (static_cast<int>(msg.size()) != m_)
        throw Error("message length does not match m");
    FqVec cw = codeword_of(msg);
    Vec point(n_);
    for (int j = 0; j < n_; ++j)
        point[j] = scale_ * static_cast<double>(cw[j]);
    return pair.label_of(point);
}

FqVec MessageSpace::decode(const NestedPair& pair, int label) const {
    const Vec& p = pair.reps()[label].point;
    FqVec cw(n_);
    for (int j = 0; j < n_; ++j) {
        double v = p[j] / scale_;
        double r = std::round(v);
        if (std::fabs(v - r) > 1e-6)
            throw Error("representative is not an integer vector at this scale");
        cw[j] = mod_pos(static_cast<std::int64_t>(r), q_);
    }
    return message_of_codeword(cw);
}

FqVec MessageSpace::msg_add(const FqVec& a, const FqVec& b) const {
    FqVec r(m_);
    for (int i = 0; i < m_; ++i) r[i] = mod_pos(a[i] + b[i], q_);
    return r;
}

FqVec MessageSpace::msg_scale(std::int64_t k, const FqVec& a) const {
    FqVec r(m_);
    for (int i = 0; i < m_; ++i) r[i] = mod_pos(k * a[i], q_);
    return r;
}

FqVec MessageSpace::unrank(std::int64_t r) const {
    FqVec msg(m_);
    for (int i = 0; i < m_; ++i) {
        msg[i] = r % q_;
        r /= q_;
    }
    return msg;
}

std::int64_t MessageSpace::rank(const FqVec& msg) const {
    std::int64_t r = 0;
    for (int i = m_ - 1; i >= 0; --i) r = r * q_ + msg[i];
    return r;
}

CodedPair nested_pair_from_codes(const LinearCode& c0, const LinearCode& c,
                                 double scale) {
    if (c0.q != c.q || c0.n != c.n)
        throw NotSubcode("codes must share q and length");
    if (!is_subcode(c0, c)) throw NotSubcode("c0 is not contained in c");
    Lattice fine = construction_a(c, scale);
    Lattice coarse = construction_a(c0, scale);
    NestedPair pair = make_nested(fine, coarse);
    MessageSpace space(c0, c, scale, pair);
    return CodedPair{std::move(pair), std::move(space)};
}

bool order_divides_check(const NestedPair& pair, std::int64_t k) {
    if (k == 0) throw Error("k must be nonzero");
    std::int64_t ak = std::llabs(k);
    for (int i = 0; i < static_cast<int>(pair.reps().size()); ++i) {
        if (i == pair.zero()) continue;
        if (ak % pair.element_order(i) == 0) return true;
    }
    return false;
}

FqVec recover_message(const FqVec& s, const FqVec& own, std::int64_t k_self,
                      std::int64_t k_other, const MessageSpace& space) {
    if (mod_pos(k_other, space.q()) == 0)
        throw NonInvertible("k_other is divisible by q");
    std::int64_t inv = mod_inverse(k_other, space.q());
    FqVec diff = space.msg_add(s, space.msg_scale(-k_self, own));
    return space.msg_scale(inv, diff);
}

} // namespace latticeguard
