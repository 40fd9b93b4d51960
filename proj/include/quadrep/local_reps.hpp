#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quadrep/exact_core.hpp"
#include "quadrep/local_invariants.hpp"

namespace quadrep {

enum class LocalStatus { representable, not_representable, undecided };

std::string to_string(LocalStatus s);

/// Outcome of a local representation decision at one place.
///
/// At a finite prime a positive answer carries a witness X mod p^N with tXSX = T mod p^N,
/// every elementary divisor of X of valuation at most ord_p(c), and N > 2 * margin where
/// margin = ord_p(2) + (largest elementary divisor valuation of tX S). Under that condition
/// Newton iteration X <- X + B(T - tXSX)/(2p^delta) converges to an exact solution over Z_p
/// congruent to X mod p^(N - margin), so the certificate is a proof.
struct LocalRepCertificate {
    Place prime;
    LocalStatus status = LocalStatus::undecided;
    std::string method;                  // "search", "real", "unimodular"
    std::optional<IntMatrix> witness;    // entries in [0, p^precision)
    unsigned precision = 0;
    unsigned margin = 0;
    std::vector<int> elementary_divisor_valuations;
    std::size_t nodes = 0;

    bool representable() const { return status == LocalStatus::representable; }
};

struct LocalSearchOptions {
    std::size_t node_budget = 4'000'000;
};

/// Depth at which every surviving search node certifies: 2 (ord_p 2 + ord_p c + ord_p det S) + 1.
unsigned lifting_depth(const GramMatrix& s, const Integer& p, const Integer& c);

/// p-adic elementary divisor valuations of x mod p^precision, nondecreasing; a value equal to
/// `precision` means the divisor vanishes mod p^precision.
std::vector<int> elementary_divisor_valuations(const IntMatrix& x, const Integer& p, unsigned precision);

/// Decides whether T = tXSX has a solution over Z_p with all elementary divisors of X dividing c.
LocalRepCertificate represents_over_zp(const GramMatrix& s, const GramMatrix& t, const Integer& p, const Integer& c,
                                       const LocalSearchOptions& opts = {});

struct LocalEverywhereReport {
    std::map<Place, LocalRepCertificate> places;  // real place and 2, primes dividing c det S det T
    bool other_primes_ok = true;                   // unimodular criterion at every remaining prime
    std::string other_primes_reason;

    bool all_representable() const;
    bool any_undecided() const;
    /// First place whose certificate is not representable, if any.
    std::optional<Place> first_failure() const;
};

LocalEverywhereReport represents_locally_everywhere(const GramMatrix& s, const GramMatrix& t, const Integer& c,
                                                    const LocalSearchOptions& opts = {});

/// Isotropy over Q_q of the orthogonal complement of the column span of an exact X.
bool complement_isotropic_at_q(const GramMatrix& s, const IntMatrix& x, const Integer& q);

/// Same question for any local representation of T at q (a certificate witness, say):
/// the complement is determined up to isometry by Witt cancellation, so only S, T, q matter.
bool complement_isotropic_at_q(const GramMatrix& s, const GramMatrix& t, const Integer& q);

/// m <= n - 5, or q odd with det S and det T both q-adic units and n - m >= 3.
bool auto_isotropy_shortcut(const GramMatrix& s, const GramMatrix& t, const Integer& q);

}  // namespace quadrep
