#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "quadrep/exact_core.hpp"

namespace quadrep {

struct LllResult {
    GramMatrix reduced;  // tU S U
    IntMatrix transform; // U, unimodular
};

/// LLL with exact rational Gram-Schmidt data, delta = 3/4.
LllResult lll_reduce(const GramMatrix& s);

/// Sign convention for vectors stored up to sign: first nonzero coordinate positive.
void canonicalize_sign(IntVector& v);

/// Fincke-Pohst enumeration on the LLL-reduced form, exact rational bounds throughout.
/// Visits every nonzero x (one per ± pair, sign-canonical) with lo <= txSx <= hi.
class ShortVectorEnumerator {
  public:
    using Visitor = std::function<bool(const IntVector& x, const Integer& norm)>;

    explicit ShortVectorEnumerator(const GramMatrix& s);

    /// The visitor returns false to stop; returns false iff stopped early.
    bool for_each(const Integer& lo, const Integer& hi, const Visitor& visit) const;

    using ShiftedVisitor = std::function<bool(const IntVector& z, const Rational& value)>;

    /// Every z in Z^n (no sign reduction) with lo <= Q(z + center) <= hi.
    bool for_each_shifted(const std::vector<Rational>& center, const Rational& lo, const Rational& hi,
                          const ShiftedVisitor& visit) const;

    const GramMatrix& gram() const { return gram_; }
    const LllResult& reduction() const { return lll_; }

  private:
    GramMatrix gram_;
    LllResult lll_;
    std::vector<Rational> b_;                // squared Gram-Schmidt norms
    std::vector<std::vector<Rational>> mu_;  // mu_[i][j], j < i
    IntMatrix inverse_;                      // U^{-1}

    // z in reduced coordinates; shift = center in reduced coordinates.
    bool walk(const std::vector<Rational>& shift, const Rational& lo, const Rational& hi, bool halve,
              const std::function<bool(const std::vector<Integer>&, const Rational&)>& leaf) const;
};

struct ShortVectorReport {
    Integer bound;
    std::vector<IntVector> vectors;  // sign-canonical, sorted by norm, then lexicographically descending
    std::vector<Integer> norms;      // norms[i] = Q(vectors[i])
    Integer minimum;                 // 0 when no vector was found

    std::size_t count_with_norm(const Integer& t) const;
};

ShortVectorReport short_vectors(const GramMatrix& s, const Integer& bound);
ShortVectorReport vectors_of_norm(const GramMatrix& s, const Integer& t);
Integer lattice_minimum(const GramMatrix& s);

/// Exponent of (QX ∩ Z^n) / XZ^m: the smallest c with c * saturation inside the image.
Integer imprimitivity_bound(const IntMatrix& x);

struct Embedding {
    IntMatrix x;                // n x m, tX S X = T
    GramMatrix source;          // T
    GramMatrix target;          // S
    IntVector elementary_divisors;
    Integer imprimitivity_bound;

    /// Verifies tXSX = T exactly; throws ArgumentError otherwise.
    static Embedding make(const GramMatrix& target, const GramMatrix& source, IntMatrix x);
};

/// All X (up to X -> -X) with tXSX = T whose imprimitivity bound divides c.
std::vector<Embedding> find_representations(const GramMatrix& s, const GramMatrix& t, const Integer& c,
                                            std::size_t limit = 0);

/// Extends sigma : R -> S to tau : M -> S with tau restricted to R equal to sigma.
/// `glue` holds the coordinates (columns) of R's basis in M's basis.
std::optional<Embedding> extend_representation(const GramMatrix& s, const Embedding& sigma, const GramMatrix& t_m,
                                               const IntMatrix& glue);

struct Superlattice {
    GramMatrix gram;        // Gram of M'
    IntMatrix inclusion;    // coordinates of M's basis in the basis of M' (columns)
    Integer index;
};

/// Breadth-first search over integral overlattices M' ⊇ M of index <= index_bound (prime-index steps),
/// returning the first with minimum >= c1 that is primitively represented by S locally everywhere.
std::optional<Superlattice> search_primitive_superlattice(const GramMatrix& s, const GramMatrix& m, const Integer& c1,
                                                          const Integer& index_bound);

}  // namespace quadrep
