#ifndef LATTICEGUARD_CONSTRUCTION_A_HPP
#define LATTICEGUARD_CONSTRUCTION_A_HPP

#include <cstdint>
#include <vector>

#include "latticeguard/lattice.hpp"

namespace latticeguard {

using FqVec = std::vector<std::int64_t>; // entries reduced to [0, q)

// Linear code over F_q (q prime); generators are kept in reduced
// row-echelon form so the dimension is the number of stored rows.
struct LinearCode {
    std::int64_t q = 0;
    int n = 0;
    std::vector<FqVec> generators;
    int dimension = 0;
};

bool is_prime(std::int64_t q);

// Validates q and reduces the generator list over F_q; rows that are linear
// combinations of earlier rows are dropped.
LinearCode make_linear_code(std::int64_t q, int n,
                            const std::vector<FqVec>& generators);

// True iff every generator of sub lies in the span of super (same q, n).
bool is_subcode(const LinearCode& sub, const LinearCode& super);

// Lattice with point set scale * (C + q Z^n); the basis is the Hermite
// normal form of the stacked generator and q*I rows.
Lattice construction_a(const LinearCode& code, double scale);

// Message space F_q^m attached to a nested Construction-A pair, with the
// reproducible bijection message <-> coset representative.
class MessageSpace {
public:
    MessageSpace(LinearCode c0, LinearCode c, double scale,
                 const NestedPair& pair);

    std::int64_t q() const { return q_; }
    int m() const { return m_; }
    std::int64_t size() const { return size_; }

    // message vector (length m over F_q) -> coset label in the pair
    int encode(const NestedPair& pair, const FqVec& msg) const;
    // coset label -> message vector
    FqVec decode(const NestedPair& pair, int label) const;

    FqVec msg_add(const FqVec& a, const FqVec& b) const;
    FqVec msg_scale(std::int64_t k, const FqVec& a) const;

    // radix-q packing, for exhaustive sweeps
    FqVec unrank(std::int64_t r) const;
    std::int64_t rank(const FqVec& msg) const;

private:
    FqVec codeword_of(const FqVec& msg) const;
    FqVec message_of_codeword(const FqVec& cw) const;

    std::int64_t q_ = 0;
    int n_ = 0;
    int m_ = 0;
    std::int64_t size_ = 0;
    double scale_ = 1.0;
    std::vector<FqVec> c0_basis_;    // RREF rows of C0
    std::vector<FqVec> coset_basis_; // extension of C0 to a basis of C
    std::vector<int> c0_pivots_;
    std::vector<int> coset_pivots_;
};

struct CodedPair {
    NestedPair pair;
    MessageSpace space;
};

// Nested pair (fine from c, coarse from c0) plus its message space.
CodedPair nested_pair_from_codes(const LinearCode& c0, const LinearCode& c,
                                 double scale);

// True iff SOME nonzero element of the quotient group has order dividing |k|,
// i.e. the secrecy precondition FAILS for gain k.
bool order_divides_check(const NestedPair& pair, std::int64_t k);

// Solve s = k_self*own (+) k_other*other for other, componentwise mod q.
FqVec recover_message(const FqVec& s, const FqVec& own, std::int64_t k_self,
                      std::int64_t k_other, const MessageSpace& space);

// Integer Hermite normal form of the row-stacked matrix (rows x n); returns
// the n x n upper-triangular canonical basis with positive diagonal.
std::vector<std::vector<std::int64_t>> hnf_rows(
    std::vector<std::vector<std::int64_t>> rows, int n);

} // namespace latticeguard

#endif
