#pragma once

#include <map>
#include <string>
#include <vector>

#include "quadrep/exact_core.hpp"

namespace quadrep {

/// A place of Q: a prime p, or the real place.
class Place {
  public:
    Place() = default;  // the real place
    static Place infinity() { return Place(); }
    /// Throws ArgumentError unless p is prime.
    static Place finite(const Integer& p);
    static Place finite(long p) { return finite(Integer(p)); }

    bool is_infinite() const { return prime_ == 0; }
    const Integer& prime() const { return prime_; }
    std::string to_string() const;

    friend bool operator==(const Place& a, const Place& b) { return a.prime_ == b.prime_; }
    friend bool operator<(const Place& a, const Place& b) { return a.prime_ < b.prime_; }

  private:
    Integer prime_ = 0;  // 0 encodes the real place
};

bool is_prime(const Integer& p);

/// Prime divisors of |n| in increasing order (trial division; n != 0).
std::vector<Integer> prime_factors(const Integer& n);

/// Additive p-adic valuation; throws DegenerateError on zero.
int ord_p(const Integer& a, const Integer& p);
int ord_p(const Rational& a, const Integer& p);

/// Canonical square-class representative: the signed squarefree integer a*Q^{*2} contains.
Integer square_class(const Rational& a);

/// Whether a is a square in Q_v.
bool is_local_square(const Rational& a, const Place& v);

int hilbert_symbol(const Rational& a, const Rational& b, const Place& v);

/// Product over i<j of (d_i, d_j)_v.
int hasse_invariant(const std::vector<Rational>& d, const Place& v);

struct SpaceInvariants {
    std::size_t rank = 0;
    Integer det_class = 1;
    /// Hasse symbols at the relevant finite primes; every prime not listed has symbol +1.
    std::map<Integer, int> hasse;
    int hasse_infinity = 1;
    std::size_t positive = 0;
    std::size_t negative = 0;

    int hasse_at(const Place& v) const;
    /// Finite primes at which this space can be nontrivial: 2, those in `hasse`, those dividing det_class.
    std::vector<Integer> relevant_primes() const;

    friend bool operator==(const SpaceInvariants&, const SpaceInvariants&) = default;
};

SpaceInvariants space_invariants(const GramMatrix& s);
SpaceInvariants space_invariants_of_diagonal(const std::vector<Rational>& d);

/// Local data at one place: enough to classify a space over Q_v.
struct LocalSpace {
    std::size_t rank = 0;
    Rational det = 1;
    int hasse = 1;
    std::size_t positive = 0;  // only meaningful at the real place
    std::size_t negative = 0;
};

LocalSpace localize(const SpaceInvariants& inv, const Place& v);

bool is_isotropic(const LocalSpace& s, const Place& v);
bool is_isotropic(const SpaceInvariants& inv, const Place& v);

/// Whether `target` embeds isometrically into `ambient` over Q_v.
bool space_represents(const SpaceInvariants& target, const SpaceInvariants& ambient, const Place& v);

/// Local invariants of the orthogonal complement of a subspace isometric to `sub` inside `ambient`
/// (well defined by Witt cancellation). Requires sub.rank <= ambient.rank.
LocalSpace complement_space(const LocalSpace& sub, const LocalSpace& ambient, const Place& v);

/// Whether some quadratic space over Q_v has the given local data.
bool local_space_exists(const LocalSpace& s, const Place& v);

struct JordanComponent {
    int scale = 0;          // exponent s: the component is p^s times a unimodular lattice
    std::size_t rank = 0;
    GramMatrix unit_block;  // entries reduced into [0, p^precision)
    bool odd = true;        // p = 2 only: whether the unit block has an odd diagonal entry
};

struct JordanSplitting {
    Integer prime;
    unsigned precision = 0;
    std::vector<JordanComponent> components;
};

JordanSplitting jordan_decomposition(const GramMatrix& s, const Integer& p);

/// The block diagonal matrix p^{s_1} U_1 ⊥ p^{s_2} U_2 ⊥ ...
GramMatrix reassemble(const JordanSplitting& js);

/// Isometry-invariant part of a Jordan splitting: per component (scale, rank, and the unit
/// determinant's square class for odd p or parity for p = 2).
std::vector<std::vector<long>> local_genus_key(const GramMatrix& s, const Integer& p);

}  // namespace quadrep
