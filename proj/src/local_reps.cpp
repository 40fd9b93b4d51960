#include "quadrep/local_reps.hpp"

#include <algorithm>
#include <utility>

namespace quadrep {

std::string to_string(LocalStatus s) {
    switch (s) {
        case LocalStatus::representable:
            return "representable";
        case LocalStatus::not_representable:
            return "not_representable";
        case LocalStatus::undecided:
            return "undecided";
    }
    return "undecided";
}

namespace {

Integer mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Integer inverse_mod(const Integer& a, const Integer& m) {
    Integer r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) throw Error("inverse_mod: not a unit");
    return r;
}

Integer power(const Integer& p, unsigned k) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), k);
    return r;
}

// Valuation of a mod p^cap, with 0 mapping to cap.
int capped_ord(const Integer& a, const Integer& p, int cap) {
    if (a == 0) return cap;
    return std::min(cap, ord_p(a, p));
}

// Solution set of A y = b over F_p: base + span(directions).
struct AffineSpace {
    IntVector base;
    std::vector<IntVector> directions;
};

std::optional<AffineSpace> solve_mod_p(std::vector<IntVector> a, IntVector b, std::size_t nvars, const Integer& p) {
    const std::size_t nrows = a.size();
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t col = 0; col < nvars && r < nrows; ++col) {
        std::size_t piv = nrows;
        for (std::size_t i = r; i < nrows; ++i)
            if (mod(a[i][col], p) != 0) {
                piv = i;
                break;
            }
        if (piv == nrows) continue;
        std::swap(a[r], a[piv]);
        std::swap(b[r], b[piv]);
        Integer inv = inverse_mod(a[r][col], p);
        for (auto& e : a[r]) e = mod(e * inv, p);
        b[r] = mod(b[r] * inv, p);
        for (std::size_t i = 0; i < nrows; ++i) {
            if (i == r) continue;
            Integer f = mod(a[i][col], p);
            if (f == 0) continue;
            for (std::size_t j = 0; j < nvars; ++j) a[i][j] = mod(a[i][j] - f * a[r][j], p);
            b[i] = mod(b[i] - f * b[r], p);
        }
        pivot_cols.push_back(col);
        ++r;
    }
    for (std::size_t i = r; i < nrows; ++i)
        if (mod(b[i], p) != 0) return std::nullopt;

    AffineSpace sol;
    sol.base.assign(nvars, 0);
    std::vector<bool> is_pivot(nvars, false);
    for (std::size_t i = 0; i < r; ++i) {
        sol.base[pivot_cols[i]] = b[i];
        is_pivot[pivot_cols[i]] = true;
    }
    for (std::size_t f = 0; f < nvars; ++f) {
        if (is_pivot[f]) continue;
        IntVector d(nvars, 0);
        d[f] = 1;
        for (std::size_t i = 0; i < r; ++i) d[pivot_cols[i]] = mod(-a[i][f], p);
        sol.directions.push_back(std::move(d));
    }
    return sol;
}

// Lazy walk over all p^dim points of an affine space over F_p.
class AffineWalker {
  public:
    AffineWalker(AffineSpace space, Integer p)
        : space_(std::move(space)), p_(std::move(p)), digits_(space_.directions.size(), 0) {}

    bool next(IntVector& out) {
        if (done_) return false;
        out = space_.base;
        for (std::size_t d = 0; d < digits_.size(); ++d) {
            if (digits_[d] == 0) continue;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += digits_[d] * space_.directions[d][i];
        }
        for (auto& e : out) e = mod(e, p_);
        std::size_t d = 0;
        for (; d < digits_.size(); ++d) {
            digits_[d] += 1;
            if (digits_[d] < p_) break;
            digits_[d] = 0;
        }
        if (d == digits_.size()) done_ = true;
        return true;
    }

  private:
    AffineSpace space_;
    Integer p_;
    IntVector digits_;
    bool done_ = false;
};

IntMatrix xt_s(const IntMatrix& x, const GramMatrix& s) { return x.transpose() * s.matrix(); }

class LocalSearch {
  public:
    LocalSearch(const GramMatrix& s, const GramMatrix& t, const Integer& p, const Integer& c, std::size_t budget)
        : s_(s), t_(t), p_(p), n_(s.rank()), m_(t.rank()), budget_(budget) {
        vc_ = ord_p(c, p);
        two_ = p == 2 ? 1 : 0;
        depth_ = lifting_depth(s, p, c);
    }

    LocalRepCertificate run() {
        LocalRepCertificate cert;
        cert.prime = Place::finite(p_);
        cert.method = "search";
        IntMatrix x(n_, 0);
        bool found = false;
        try {
            found = first_level(x, 0);
        } catch (const BudgetExhausted&) {
            cert.status = LocalStatus::undecided;
            cert.nodes = nodes_;
            cert.precision = deepest_;
            return cert;
        }
        cert.nodes = nodes_;
        if (found) {
            cert.status = LocalStatus::representable;
            cert.witness = witness_;
            cert.precision = precision_;
            cert.margin = margin_;
            cert.elementary_divisor_valuations = valuations_;
        } else {
            cert.status = LocalStatus::not_representable;
            cert.precision = deepest_;
        }
        return cert;
    }

  private:
    struct BudgetExhausted {};

    void count_node(unsigned k) {
        if (++nodes_ > budget_) throw BudgetExhausted{};
        deepest_ = std::max(deepest_, k);
    }

    bool violates_divisor_bound(const IntMatrix& x, unsigned k) const {
        for (int v : elementary_divisor_valuations(x, p_, k))
            if (v > vc_) return true;
        return false;
    }

    // Columns 0..j-1 of x are fixed mod p; choose column j.
    bool first_level(IntMatrix& x, std::size_t j) {
        if (j == m_) return node(x, 1);
        std::vector<IntVector> rows;
        IntVector rhs;
        for (std::size_t i = 0; i < j; ++i) {
            IntVector row(n_);
            for (std::size_t l = 0; l < n_; ++l) {
                Integer e = 0;
                for (std::size_t r = 0; r < n_; ++r) e += x(r, i) * s_(r, l);
                row[l] = mod(e, p_);
            }
            rows.push_back(std::move(row));
            rhs.push_back(mod(t_(i, j), p_));
        }
        auto space = solve_mod_p(rows, rhs, n_, p_);
        if (!space) return false;
        AffineWalker walk(std::move(*space), p_);
        IntVector y;
        IntMatrix next(n_, j + 1);
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t i = 0; i < j; ++i) next(r, i) = x(r, i);
        while (walk.next(y)) {
            if (mod(s_.q(y) - t_(j, j), p_) != 0) continue;
            count_node(1);
            next.set_column(j, y);
            if (violates_divisor_bound(next, 1)) continue;
            if (first_level(next, j + 1)) return true;
        }
        return false;
    }

    // x (entries in [0, p^k)) satisfies tXSX = T mod p^k.
    bool node(const IntMatrix& x, unsigned k) {
        auto vals = elementary_divisor_valuations(x, p_, k);
        for (int v : vals)
            if (v > vc_) return false;
        auto dvals = elementary_divisor_valuations(xt_s(x, s_), p_, k);
        const int delta = dvals.empty() ? 0 : dvals.back();
        if (delta < static_cast<int>(k)) {
            const int margin = two_ + delta;
            const int top = vals.empty() ? 0 : vals.back();
            if (static_cast<int>(k) > 2 * margin && top < static_cast<int>(k) - margin) {
                witness_ = x;
                precision_ = k;
                margin_ = static_cast<unsigned>(margin);
                valuations_ = vals;
                return true;
            }
        }
        if (k >= depth_) throw Error("local search: uncertified node at the lifting depth");
        return lift(x, k);
    }

    bool lift(const IntMatrix& x, unsigned k) {
        const Integer pk = power(p_, k);
        const Integer pk1 = pk * p_;
        IntMatrix xsx = x.transpose() * s_.matrix() * x;
        IntMatrix sx = s_.matrix() * x;  // column i is S x_i
        std::vector<IntVector> rows;
        IntVector rhs;
        const std::size_t nvars = n_ * m_;
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = i; j < m_; ++j) {
                Integer e = t_(i, j) - xsx(i, j);
                if (mod(e, pk) != 0) throw Error("local search: node is not a solution at its level");
                e /= pk;
                IntVector row(nvars, 0);
                if (i == j) {
                    if (p_ == 2) {
                        if (mod(e, 2) != 0) return false;
                        continue;
                    }
                    for (std::size_t l = 0; l < n_; ++l) row[i * n_ + l] = mod(2 * sx(l, i), p_);
                } else {
                    for (std::size_t l = 0; l < n_; ++l) {
                        row[i * n_ + l] = mod(sx(l, j), p_);
                        row[j * n_ + l] = mod(sx(l, i), p_);
                    }
                }
                rows.push_back(std::move(row));
                rhs.push_back(mod(e, p_));
            }
        }
        auto space = solve_mod_p(rows, rhs, nvars, p_);
        if (!space) return false;
        AffineWalker walk(std::move(*space), p_);
        IntVector y;
        IntMatrix child(n_, m_);
        while (walk.next(y)) {
            count_node(k + 1);
            for (std::size_t i = 0; i < m_; ++i)
                for (std::size_t l = 0; l < n_; ++l) child(l, i) = mod(x(l, i) + pk * y[i * n_ + l], pk1);
            if (node(child, k + 1)) return true;
        }
        return false;
    }

    const GramMatrix& s_;
    const GramMatrix& t_;
    Integer p_;
    std::size_t n_, m_;
    std::size_t budget_;
    int vc_ = 0;
    int two_ = 0;
    unsigned depth_ = 1;
    std::size_t nodes_ = 0;
    unsigned deepest_ = 0;
    IntMatrix witness_;
    unsigned precision_ = 0;
    unsigned margin_ = 0;
    std::vector<int> valuations_;
};

void require_nondegenerate(const GramMatrix& s, const GramMatrix& t, const Integer& c) {
    if (det(s) == 0) throw DegenerateError("ambient Gram matrix is singular");
    if (det(t) == 0) throw DegenerateError("target Gram matrix is singular");
    if (c < 1) throw ArgumentError("imprimitivity bound c must be positive");
}

}  // namespace

unsigned lifting_depth(const GramMatrix& s, const Integer& p, const Integer& c) {
    const int two = p == 2 ? 1 : 0;
    return static_cast<unsigned>(2 * (two + ord_p(c, p) + ord_p(det(s), p)) + 1);
}

std::vector<int> elementary_divisor_valuations(const IntMatrix& x, const Integer& p, unsigned precision) {
    const int cap = static_cast<int>(precision);
    const Integer pk = power(p, precision);
    const std::size_t r = x.rows(), c = x.cols();
    IntMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) a(i, j) = mod(x(i, j), pk);
    std::vector<int> out;
    const std::size_t len = std::min(r, c);
    for (std::size_t t = 0; t < len; ++t) {
        int best = cap;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < r && best > 0; ++i)
            for (std::size_t j = t; j < c; ++j) {
                int v = capped_ord(a(i, j), p, cap);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                    if (v == 0) break;
                }
            }
        if (best == cap) {
            out.resize(len, cap);
            break;
        }
        if (bi != t)
            for (std::size_t j = 0; j < c; ++j) std::swap(a(t, j), a(bi, j));
        if (bj != t)
            for (std::size_t i = 0; i < r; ++i) std::swap(a(i, t), a(i, bj));
        const Integer pv = power(p, static_cast<unsigned>(best));
        const Integer uinv = inverse_mod(a(t, t) / pv, pk);
        for (std::size_t i = t + 1; i < r; ++i) {
            if (a(i, t) == 0) continue;
            Integer f = mod((a(i, t) / pv) * uinv, pk);
            for (std::size_t j = t; j < c; ++j) a(i, j) = mod(a(i, j) - f * a(t, j), pk);
        }
        for (std::size_t j = t + 1; j < c; ++j) a(t, j) = 0;  // cleared by column operations
        out.push_back(best);
    }
    std::sort(out.begin(), out.end());
    return out;
}

LocalRepCertificate represents_over_zp(const GramMatrix& s, const GramMatrix& t, const Integer& p, const Integer& c,
                                       const LocalSearchOptions& opts) {
    require_nondegenerate(s, t, c);
    if (!is_prime(p)) throw ArgumentError("not a prime: " + p.get_str());
    if (t.rank() > s.rank()) {
        LocalRepCertificate cert;
        cert.prime = Place::finite(p);
        cert.status = LocalStatus::not_representable;
        cert.method = "rank";
        return cert;
    }
    LocalRepCertificate cert = LocalSearch(s, t, p, c, opts.node_budget).run();
    if (cert.status == LocalStatus::undecided) {
        // one escalation with twice the budget
        cert = LocalSearch(s, t, p, c, 2 * opts.node_budget).run();
    }
    return cert;
}

bool LocalEverywhereReport::all_representable() const {
    if (!other_primes_ok) return false;
    for (const auto& [v, cert] : places)
        if (!cert.representable()) return false;
    return true;
}

bool LocalEverywhereReport::any_undecided() const {
    for (const auto& [v, cert] : places)
        if (cert.status == LocalStatus::undecided) return true;
    return false;
}

std::optional<Place> LocalEverywhereReport::first_failure() const {
    for (const auto& [v, cert] : places)
        if (!cert.representable()) return v;
    return std::nullopt;
}

LocalEverywhereReport represents_locally_everywhere(const GramMatrix& s, const GramMatrix& t, const Integer& c,
                                                    const LocalSearchOptions& opts) {
    require_nondegenerate(s, t, c);
    LocalEverywhereReport report;

    LocalRepCertificate real;
    real.prime = Place::infinity();
    real.method = "real";
    const bool fits = t.rank() <= s.rank();
    const auto si = space_invariants(s), ti = space_invariants(t);
    real.status = fits && ti.positive <= si.positive && ti.negative <= si.negative ? LocalStatus::representable
                                                                                   : LocalStatus::not_representable;
    report.places.emplace(Place::infinity(), real);

    const Integer ds = det(s), dt = det(t);
    std::vector<Integer> primes{2};
    for (const auto& q : prime_factors(c * ds * dt)) primes.push_back(q);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    for (const auto& q : primes) report.places.emplace(Place::finite(q), represents_over_zp(s, t, q, c, opts));

    // Every other prime p is odd with S, T unimodular and p not dividing c.
    if (!fits) {
        report.other_primes_ok = false;
        report.other_primes_reason = "rank of T exceeds rank of S";
    } else if (s.rank() > t.rank()) {
        report.other_primes_reason = "unimodular, positive corank";
    } else {
        const Integer prod = ds * dt;
        report.other_primes_ok = prod > 0 && mpz_perfect_square_p(prod.get_mpz_t()) != 0;
        report.other_primes_reason = report.other_primes_ok ? "unimodular, equal determinant classes"
                                                            : "unimodular, determinant classes differ";
    }
    return report;
}

bool complement_isotropic_at_q(const GramMatrix& s, const IntMatrix& x, const Integer& q) {
    if (x.rows() != s.rank()) throw ArgumentError("complement_isotropic_at_q: X has the wrong number of rows");
    if (det(s.congruent(x)) == 0) throw DegenerateError("complement_isotropic_at_q: tXSX is singular");
    IntMatrix w = orthogonal_complement(s, x);
    if (w.cols() == 0) return false;
    return is_isotropic(space_invariants(s.congruent(w)), Place::finite(q));
}

bool complement_isotropic_at_q(const GramMatrix& s, const GramMatrix& t, const Integer& q) {
    if (det(s) == 0 || det(t) == 0) throw DegenerateError("complement_isotropic_at_q: singular Gram matrix");
    if (t.rank() > s.rank()) throw ArgumentError("complement_isotropic_at_q: rank of T exceeds rank of S");
    const Place v = Place::finite(q);
    LocalSpace sub = localize(space_invariants(t), v), amb = localize(space_invariants(s), v);
    LocalSpace comp = complement_space(sub, amb, v);
    if (!local_space_exists(comp, v)) throw ArgumentError("complement_isotropic_at_q: T is not represented over Q_q");
    return is_isotropic(comp, v);
}

bool auto_isotropy_shortcut(const GramMatrix& s, const GramMatrix& t, const Integer& q) {
    const std::size_t n = s.rank(), m = t.rank();
    if (m + 5 <= n) return true;
    if (q == 2 || m + 3 > n) return false;
    const Integer ds = det(s), dt = det(t);
    return ds % q != 0 && dt % q != 0;
}

}  // namespace quadrep
