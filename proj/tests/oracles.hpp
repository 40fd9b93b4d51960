// Independent brute-force references. None of these call into the library's algorithms beyond
// the matrix containers; they are deliberately naive.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "quadrep/exact_core.hpp"

namespace oracle {

using quadrep::GramMatrix;
using quadrep::Integer;
using quadrep::IntMatrix;
using quadrep::IntVector;
using Square = std::vector<std::vector<Integer>>;

inline Square to_square(const IntMatrix& m) {
    Square a(m.rows(), std::vector<Integer>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
    return a;
}

// Laplace expansion along the first row.
inline Integer cofactor_det(const Square& a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    if (n == 1) return a[0][0];
    Integer total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (a[0][c] == 0) continue;
        Square minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Integer> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(a[r][k]);
            minor.push_back(row);
        }
        Integer term = a[0][c] * cofactor_det(minor);
        total += (c % 2 == 0) ? term : Integer(-term);
    }
    return total;
}

inline void combinations(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    while (true) {
        out.push_back(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// gcd of all k x k minors (0 when all vanish).
inline Integer minor_gcd(const IntMatrix& x, std::size_t k) {
    std::vector<std::vector<std::size_t>> rows, cols;
    combinations(x.rows(), k, rows);
    combinations(x.cols(), k, cols);
    Integer g = 0;
    for (const auto& r : rows)
        for (const auto& c : cols) {
            Square m(k, std::vector<Integer>(k));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) m[i][j] = x(r[i], c[j]);
            g = gcd(g, cofactor_det(m));
        }
    return g;
}

// Elementary divisors as ratios of determinantal divisors.
inline IntVector smith_by_minors(const IntMatrix& x) {
    IntVector out;
    Integer prev = 1;
    const std::size_t len = std::min(x.rows(), x.cols());
    for (std::size_t k = 1; k <= len; ++k) {
        Integer g = minor_gcd(x, k);
        if (g == 0) {
            out.push_back(0);
            prev = 0;
            continue;
        }
        out.push_back(g / prev);
        prev = g;
    }
    return out;
}

inline Integer quad(const GramMatrix& s, const IntVector& x) {
    Integer q = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) q += x[i] * s(i, j) * x[j];
    return q;
}

inline bool sign_canonical(const IntVector& v) {
    for (const auto& e : v)
        if (e != 0) return e > 0;
    return false;
}

// Box radii r_i with x_i^2 det S <= hi * cofactor_ii, which holds for every x with Q(x) <= hi.
inline std::vector<Integer> box_radii(const GramMatrix& s, const Integer& hi) {
    const std::size_t n = s.rank();
    Square a = to_square(s.matrix());
    Integer d = cofactor_det(a);
    std::vector<Integer> radius(n);
    for (std::size_t i = 0; i < n; ++i) {
        Square minor;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == i) continue;
            std::vector<Integer> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != i) row.push_back(a[r][c]);
            minor.push_back(row);
        }
        Integer cii = cofactor_det(minor);
        Integer r = 0;
        while ((r + 1) * (r + 1) * d <= hi * cii) ++r;
        radius[i] = r;
    }
    return radius;
}

// All sign-canonical x != 0 with lo <= Q(x) <= hi, by walking the whole box.
inline std::vector<IntVector> box_vectors(const GramMatrix& s, const Integer& lo, const Integer& hi) {
    const std::size_t n = s.rank();
    std::vector<Integer> radius = box_radii(s, hi);
    std::vector<IntVector> out;
    IntVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -radius[i];
    while (true) {
        if (sign_canonical(x)) {
            Integer q = quad(s, x);
            if (q >= lo && q <= hi) out.push_back(x);
        }
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (x[i] < radius[i]) {
                ++x[i];
                break;
            }
            x[i] = -radius[i];
        }
        if (i == n) break;
    }
    return out;
}

inline long squarefree_part(long a) {
    long sign = a < 0 ? -1 : 1;
    long m = a < 0 ? -a : a;
    long out = 1;
    for (long d = 2; d * d <= m; ++d) {
        int e = 0;
        while (m % d == 0) {
            m /= d;
            ++e;
        }
        if (e % 2) out *= d;
    }
    return sign * out * m;
}

inline long modp(long a, long m) { return ((a % m) + m) % m; }

// Solvability of z^2 = a x^2 + b y^2 in Q_p by exhaustive search mod p^k over primitive
// (x, y) normalized to x = 1 or (y = 1, p | x); p = 0 means the real place.
inline bool hilbert_solvable(long a, long b, long p) {
    if (p == 0) return a > 0 || b > 0;
    a = squarefree_part(a);
    b = squarefree_part(b);
    const int k = p == 2 ? 5 : 3;
    long pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    std::vector<bool> square(pk, false);
    for (long z = 0; z < pk; ++z) square[(z * z) % pk] = true;
    for (long y = 0; y < pk; ++y)
        if (square[modp(a + b * modp(y * y, pk), pk)]) return true;
    for (long x = 0; x < pk; x += p)
        if (square[modp(a * modp(x * x, pk) + b, pk)]) return true;
    return false;
}

inline bool three_squares(long t) {
    while (t > 0 && t % 4 == 0) t /= 4;
    return t % 8 != 7;
}

inline int vp(Integer a, long p) {
    if (a == 0) return 1 << 20;
    int v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

// p-adic elementary divisor valuations of an integer lift, from minor gcds, capped at `cap`.
inline std::vector<int> ed_valuations(const IntMatrix& x, long p, int cap) {
    std::vector<int> out;
    int prev = 0;
    bool vanished = false;
    const std::size_t len = std::min(x.rows(), x.cols());
    for (std::size_t k = 1; k <= len; ++k) {
        Integer g = vanished ? Integer(0) : minor_gcd(x, k);
        if (g == 0) {
            vanished = true;
            out.push_back(cap);
            continue;
        }
        int v = vp(g, p);
        out.push_back(std::min(cap, v - prev));
        prev = v;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Naive local representation decision: expand X mod p^k digit by digit over all p^n column digits,
// checking tXSX = T mod p^(k+1) directly; same elementary-divisor bound and Newton certificate rule.
// Returns nullopt when the node budget or the depth `limit` is exhausted without a decision.
class NaiveLocal {
  public:
    NaiveLocal(const GramMatrix& s, const GramMatrix& t, long p, int vc, int limit, std::size_t budget)
        : s_(s), t_(t), p_(p), vc_(vc), limit_(limit), budget_(budget), n_(s.rank()), m_(t.rank()) {}

    std::optional<bool> run() {
        IntMatrix x(n_, m_);
        try {
            if (expand(x, 0, 1)) return true;
        } catch (const Exhausted&) {
            return std::nullopt;
        }
        if (inconclusive_) return std::nullopt;
        return false;
    }

  private:
    struct Exhausted {};

    Integer pow(int k) const {
        Integer r = 1;
        for (int i = 0; i < k; ++i) r *= p_;
        return r;
    }

    // Choose digits of columns >= col at level k -> k + 1 (x already holds the lower digits).
    bool expand(IntMatrix& x, std::size_t col, int k1) {
        const Integer pk = pow(k1 - 1), pk1 = pk * p_;
        if (col == m_) return node(x, k1);
        IntVector base = x.column(col);
        IntVector digit(n_, 0);
        while (true) {
            if (++count_ > budget_) throw Exhausted{};
            IntVector v = base;
            for (std::size_t r = 0; r < n_; ++r) v[r] += pk * digit[r];
            x.set_column(col, v);
            bool ok = true;
            for (std::size_t i = 0; i <= col && ok; ++i) {
                Integer e = 0;
                IntVector xi = x.column(i);
                for (std::size_t a = 0; a < n_; ++a)
                    for (std::size_t b = 0; b < n_; ++b) e += xi[a] * s_(a, b) * v[b];
                if ((e - t_(i, col)) % pk1 != 0) ok = false;
            }
            if (ok && expand(x, col + 1, k1)) return true;
            std::size_t r = 0;
            for (; r < n_; ++r) {
                if (++digit[r] < p_) break;
                digit[r] = 0;
            }
            if (r == n_) break;
        }
        x.set_column(col, base);
        return false;
    }

    bool node(IntMatrix& x, int k) {
        auto vals = ed_valuations(x, p_, k);
        for (int v : vals)
            if (v > vc_) return false;
        IntMatrix a = x.transpose() * s_.matrix();
        auto dvals = ed_valuations(a, p_, k);
        int delta = dvals.empty() ? 0 : dvals.back();
        if (delta < k) {
            int margin = (p_ == 2 ? 1 : 0) + delta;
            int top = vals.empty() ? 0 : vals.back();
            if (k > 2 * margin && top < k - margin) return true;
        }
        if (k >= limit_) {
            inconclusive_ = true;
            return false;
        }
        return expand(x, 0, k + 1);
    }

    const GramMatrix& s_;
    const GramMatrix& t_;
    long p_;
    int vc_, limit_;
    std::size_t budget_, count_ = 0;
    std::size_t n_, m_;
    bool inconclusive_ = false;
};

inline GramMatrix random_unimodular_congruent(const GramMatrix& s, std::mt19937& rng, int steps = 6) {
    const std::size_t n = s.rank();
    IntMatrix u = IntMatrix::identity(n);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1), coef(-2, 2);
    for (int st = 0; st < steps && n > 1; ++st) {
        int i = pick(rng), j = pick(rng);
        if (i == j) continue;
        int c = coef(rng);
        for (std::size_t r = 0; r < n; ++r) u(r, i) += c * u(r, j);
    }
    return s.congruent(u);
}

inline IntMatrix random_unimodular(std::size_t n, std::mt19937& rng, int steps = 6) {
    IntMatrix u = IntMatrix::identity(n);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1), coef(-2, 2);
    for (int st = 0; st < steps && n > 1; ++st) {
        int i = pick(rng), j = pick(rng);
        if (i == j) continue;
        int c = coef(rng);
        for (std::size_t r = 0; r < n; ++r) u(r, i) += c * u(r, j);
    }
    return u;
}

// Random positive definite Gram: tA A + diag with small entries.
inline GramMatrix random_positive_definite(std::size_t n, int entry, std::mt19937& rng) {
    std::uniform_int_distribution<int> e(-entry, entry);
    while (true) {
        IntMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = e(rng);
        IntMatrix s(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                Integer v = 0;
                for (std::size_t k = 0; k < n; ++k) v += a(k, i) * a(k, j);
                if (i == j) v += 1;
                s(i, j) = v;
                s(j, i) = v;
            }
        GramMatrix g(s);
        Square sq = to_square(s);
        bool pd = true;
        for (std::size_t k = 1; k <= n && pd; ++k) {
            Square lead(k, std::vector<Integer>(k));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) lead[i][j] = sq[i][j];
            if (cofactor_det(lead) <= 0) pd = false;
        }
        if (pd) return g;
    }
}

inline GramMatrix e8() {
    // Cartan matrix of E8 (Bourbaki numbering), an even unimodular Gram matrix.
    return GramMatrix{{2, 0, -1, 0, 0, 0, 0, 0},  {0, 2, 0, -1, 0, 0, 0, 0},  {-1, 0, 2, -1, 0, 0, 0, 0},
                      {0, -1, -1, 2, -1, 0, 0, 0}, {0, 0, 0, -1, 2, -1, 0, 0}, {0, 0, 0, 0, -1, 2, -1, 0},
                      {0, 0, 0, 0, 0, -1, 2, -1},  {0, 0, 0, 0, 0, 0, -1, 2}};
}

}  // namespace oracle
