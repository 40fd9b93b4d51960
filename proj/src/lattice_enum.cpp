#include "quadrep/lattice_enum.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "quadrep/local_invariants.hpp"
#include "quadrep/local_reps.hpp"

namespace quadrep {

namespace {

using RMat = std::vector<std::vector<Rational>>;

Integer round_half_up(const Rational& q) {
    Rational h = q + Rational(1, 2);
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
    return r;
}

Integer floor_of(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Gram-Schmidt data of a positive definite Gram matrix: squared norms b and coefficients mu[i][j], j < i.
void gram_schmidt(const IntMatrix& g, std::vector<Rational>& b, RMat& mu) {
    const std::size_t n = g.rows();
    b.assign(n, 0);
    mu.assign(n, std::vector<Rational>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            Rational v = g(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= mu[j][k] * mu[i][k] * b[k];
            mu[i][j] = v / b[j];
        }
        Rational v = g(i, i);
        for (std::size_t k = 0; k < i; ++k) v -= mu[i][k] * mu[i][k] * b[k];
        if (v <= 0) throw ArgumentError("Gram matrix is not positive definite");
        b[i] = v;
    }
}

void require_positive_definite(const GramMatrix& s) {
    if (!is_positive_definite(s)) throw ArgumentError("Gram matrix is not positive definite");
}

RMat rational_inverse(const IntMatrix& a) {
    const std::size_t n = a.rows();
    RMat m(n, std::vector<Rational>(2 * n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j);
        m[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) throw DegenerateError("matrix is singular");
        std::swap(m[piv], m[c]);
        Rational inv = 1 / m[c][c];
        for (auto& e : m[c]) e *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            Rational f = m[r][c];
            for (std::size_t k = 0; k < 2 * n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    RMat out(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = m[i][n + j];
    return out;
}

IntVector negated(IntVector v) {
    for (auto& e : v) e = -e;
    return v;
}

}  // namespace

LllResult lll_reduce(const GramMatrix& s) {
    require_positive_definite(s);
    const std::size_t n = s.rank();
    IntMatrix g = s.matrix();
    IntMatrix u = IntMatrix::identity(n);
    std::vector<Rational> b;
    RMat mu;
    if (n == 0) return {s, u};
    gram_schmidt(g, b, mu);
    const Rational delta(3, 4);
    std::size_t k = 1;
    while (k < n) {
        for (std::size_t jj = k; jj-- > 0;) {
            Integer r = round_half_up(mu[k][jj]);
            if (r == 0) continue;
            // b_k -= r b_j
            for (std::size_t l = 0; l < n; ++l) u(l, k) -= r * u(l, jj);
            for (std::size_t l = 0; l < n; ++l) g(l, k) -= r * g(l, jj);
            for (std::size_t l = 0; l < n; ++l) g(k, l) -= r * g(jj, l);
            for (std::size_t l = 0; l < jj; ++l) mu[k][l] -= r * mu[jj][l];
            mu[k][jj] -= r;
        }
        if (b[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1]) {
            ++k;
            continue;
        }
        for (std::size_t l = 0; l < n; ++l) std::swap(u(l, k), u(l, k - 1));
        for (std::size_t l = 0; l < n; ++l) std::swap(g(l, k), g(l, k - 1));
        for (std::size_t l = 0; l < n; ++l) std::swap(g(k, l), g(k - 1, l));
        gram_schmidt(g, b, mu);
        k = std::max<std::size_t>(k - 1, 1);
    }
    return {GramMatrix(g), u};
}

void canonicalize_sign(IntVector& v) {
    for (const auto& e : v) {
        if (e == 0) continue;
        if (e < 0)
            for (auto& x : v) x = -x;
        return;
    }
}

ShortVectorEnumerator::ShortVectorEnumerator(const GramMatrix& s) : gram_(s), lll_(lll_reduce(s)) {
    if (s.rank() > 0) {
        gram_schmidt(lll_.reduced.matrix(), b_, mu_);
        inverse_ = unimodular_inverse(lll_.transform);
    }
}

bool ShortVectorEnumerator::walk(const std::vector<Rational>& shift, const Rational& lo, const Rational& hi, bool halve,
                                 const std::function<bool(const std::vector<Integer>&, const Rational&)>& leaf) const {
    const std::size_t n = gram_.rank();
    if (n == 0 || hi < 0) return true;
    std::vector<Integer> z(n, 0);
    std::vector<Rational> w(n, 0);  // z + shift
    bool stopped = false;

    // Coordinate i is chosen with coordinates above it fixed; used = sum of contributions above.
    auto recurse = [&](auto&& self, std::size_t i, const Rational& used, bool zero_above) -> void {
        Rational c = -shift[i];
        for (std::size_t l = i + 1; l < n; ++l) c -= mu_[l][i] * w[l];
        const Rational room = (hi - used) / b_[i];
        Integer s;
        mpz_sqrt(s.get_mpz_t(), floor_of(room).get_mpz_t());
        Integer first = floor_of(c) - s - 1, last = floor_of(c) + s + 2;
        auto fits = [&](const Integer& v) {
            Rational d = v - c;
            return d * d <= room;
        };
        while (first <= last && !fits(first)) ++first;
        while (last >= first && !fits(last)) --last;
        if (halve && zero_above && first < 0) first = 0;
        for (Integer v = first; v <= last && !stopped; ++v) {
            z[i] = v;
            w[i] = v + shift[i];
            Rational d = v - c;
            Rational here = used + b_[i] * d * d;
            if (i == 0) {
                if (halve && zero_above && v == 0) continue;
                if (here < lo) continue;
                if (!leaf(z, here)) stopped = true;
            } else {
                self(self, i - 1, here, zero_above && v == 0);
            }
        }
        z[i] = 0;
        w[i] = shift[i];
    };
    for (std::size_t i = 0; i < n; ++i) w[i] = shift[i];
    recurse(recurse, n - 1, Rational(0), true);
    return !stopped;
}

bool ShortVectorEnumerator::for_each(const Integer& lo, const Integer& hi, const Visitor& visit) const {
    const std::size_t n = gram_.rank();
    if (hi < 1) return true;
    const IntMatrix& u = lll_.transform;
    return walk(std::vector<Rational>(n, 0), Rational(lo), Rational(hi), true,
                [&](const std::vector<Integer>& z, const Rational& value) {
                    IntVector out = u * IntVector(z.begin(), z.end());
                    canonicalize_sign(out);
                    return visit(out, value.get_num());
                });
}

bool ShortVectorEnumerator::for_each_shifted(const std::vector<Rational>& center, const Rational& lo,
                                             const Rational& hi, const ShiftedVisitor& visit) const {
    const std::size_t n = gram_.rank();
    if (center.size() != n) throw ArgumentError("center has the wrong dimension");
    std::vector<Rational> shift(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) shift[i] += inverse_(i, k) * center[k];
    const IntMatrix& u = lll_.transform;
    return walk(shift, lo, hi, false, [&](const std::vector<Integer>& z, const Rational& value) {
        return visit(u * IntVector(z.begin(), z.end()), value);
    });
}

std::size_t ShortVectorReport::count_with_norm(const Integer& t) const {
    return static_cast<std::size_t>(std::count(norms.begin(), norms.end(), t));
}

namespace {

ShortVectorReport collect(const GramMatrix& s, const Integer& lo, const Integer& hi) {
    require_positive_definite(s);
    ShortVectorReport rep;
    rep.bound = hi;
    std::vector<std::pair<Integer, IntVector>> found;
    ShortVectorEnumerator(s).for_each(lo, hi, [&](const IntVector& v, const Integer& norm) {
        found.emplace_back(norm, v);
        return true;
    });
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    });
    rep.minimum = 0;
    for (auto& [norm, v] : found) {
        rep.norms.push_back(norm);
        rep.vectors.push_back(std::move(v));
    }
    if (!rep.norms.empty()) rep.minimum = rep.norms.front();
    return rep;
}

}  // namespace

ShortVectorReport short_vectors(const GramMatrix& s, const Integer& bound) { return collect(s, 1, bound); }

ShortVectorReport vectors_of_norm(const GramMatrix& s, const Integer& t) { return collect(s, t, t); }

Integer lattice_minimum(const GramMatrix& s) {
    require_positive_definite(s);
    if (s.rank() == 0) throw ArgumentError("lattice_minimum of the zero lattice");
    LllResult red = lll_reduce(s);
    Integer best = red.reduced(0, 0);
    for (std::size_t i = 1; i < s.rank(); ++i) best = std::min(best, red.reduced(i, i));
    ShortVectorEnumerator(s).for_each(1, best, [&](const IntVector&, const Integer& norm) {
        if (norm < best) best = norm;
        return true;
    });
    return best;
}

Integer imprimitivity_bound(const IntMatrix& x) {
    if (x.cols() == 0) return 1;
    if (rank(x) != x.cols()) throw DegenerateError("imprimitivity_bound: columns are linearly dependent");
    return smith_normal_form(x).divisors.back();
}

Embedding Embedding::make(const GramMatrix& target, const GramMatrix& source, IntMatrix x) {
    if (x.rows() != target.rank() || x.cols() != source.rank())
        throw ArgumentError("embedding matrix has the wrong shape");
    if (!(target.congruent(x) == source)) throw ArgumentError("embedding does not satisfy tXSX = T");
    Embedding e;
    e.target = target;
    e.source = source;
    e.elementary_divisors = x.cols() ? smith_normal_form(x).divisors : IntVector{};
    e.imprimitivity_bound = e.elementary_divisors.empty() ? Integer(1) : e.elementary_divisors.back();
    if (e.imprimitivity_bound == 0) throw DegenerateError("embedding is not injective");
    e.x = std::move(x);
    return e;
}

namespace {

// Column-by-column search for Y with tY S Y = T. Column 0 runs over the vectors of norm T_00; a later column j
// runs over the coset {v : tY_{<j} S v = T_{<j,j}} = v0 + K Z^(n-j), K the orthogonal complement of the fixed
// columns, where Q(v0 + Kz) = Q_K(z + u) + Q(v0) - Q_K(u) with u the K-component of v0.
class ColumnSearch {
  public:
    using Accept = std::function<bool(const IntMatrix&, std::size_t)>;  // partial prune, returns false to prune
    using Emit = std::function<bool(const IntMatrix&)>;                  // returns false to stop

    ColumnSearch(const GramMatrix& s, const GramMatrix& t, Accept accept, Emit emit, bool canonical_first)
        : s_(s), t_(t), accept_(std::move(accept)), emit_(std::move(emit)), canonical_first_(canonical_first) {}

    // Runs from column `start`; y holds the given earlier columns. Returns false if stopped.
    bool run(IntMatrix y, std::size_t start) { return step(y, start); }

  private:
    bool place(IntMatrix& y, std::size_t j, const IntVector& v) {
        y.set_column(j, v);
        if (!accept_(y, j + 1)) return true;
        return step(y, j + 1);
    }

    bool step(IntMatrix& y, std::size_t j) {
        if (j == t_.rank()) return emit_(y);
        if (j == 0) {
            const bool both = !canonical_first_;
            return ShortVectorEnumerator(s_).for_each(t_(0, 0), t_(0, 0), [&](const IntVector& v, const Integer&) {
                if (!place(y, 0, v)) return false;
                return !both || place(y, 0, negated(v));
            });
        }
        const std::size_t n = s_.rank();
        const IntMatrix fixed = y.block(0, 0, n, j);
        const IntMatrix a = fixed.transpose() * s_.matrix();
        SmithForm sf = smith_normal_form(a);
        IntVector b(j);
        for (std::size_t i = 0; i < j; ++i) b[i] = t_(i, j);
        IntVector ub = sf.u * b;
        IntVector z0(n, 0);
        for (std::size_t i = 0; i < j; ++i) {
            const Integer& d = sf.divisors[i];
            if (d == 0) throw DegenerateError("fixed columns are linearly dependent");
            if (ub[i] % d != 0) return true;
            z0[i] = ub[i] / d;
        }
        const IntVector v0 = sf.v * z0;
        const IntMatrix k = orthogonal_complement(s_, fixed);
        if (k.cols() == 0) return s_.q(v0) == t_(j, j) ? place(y, j, v0) : true;

        const GramMatrix gk = s_.congruent(k);
        const IntVector kv = k.transpose() * (s_.matrix() * v0);
        const RMat gk_inv = rational_inverse(gk.matrix());
        const std::size_t r = k.cols();
        std::vector<Rational> u(r, 0);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t l = 0; l < r; ++l) u[i] += gk_inv[i][l] * kv[l];
        Rational qu = 0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t l = 0; l < r; ++l) qu += u[i] * gk(i, l) * u[l];
        const Rational target = Rational(t_(j, j) - s_.q(v0)) + qu;
        if (target < 0) return true;
        return ShortVectorEnumerator(gk).for_each_shifted(u, target, target, [&](const IntVector& z, const Rational&) {
            IntVector v = v0;
            IntVector kz = k * z;
            for (std::size_t i = 0; i < n; ++i) v[i] += kz[i];
            return place(y, j, v);
        });
    }

    const GramMatrix& s_;
    const GramMatrix& t_;
    Accept accept_;
    Emit emit_;
    bool canonical_first_;
};

IntMatrix leading_columns(const IntMatrix& y, std::size_t k) { return y.block(0, 0, y.rows(), k); }

}  // namespace

std::vector<Embedding> find_representations(const GramMatrix& s, const GramMatrix& t, const Integer& c,
                                            std::size_t limit) {
    require_positive_definite(s);
    if (c < 1) throw ArgumentError("imprimitivity bound c must be positive");
    if (det(t) == 0) throw DegenerateError("target Gram matrix is singular");
    std::vector<Embedding> out;
    if (t.rank() > s.rank() || !is_positive_definite(t)) return out;
    ColumnSearch search(
        s, t,
        [&](const IntMatrix& y, std::size_t k) {
            IntMatrix part = leading_columns(y, k);
            return c % imprimitivity_bound(part) == 0;
        },
        [&](const IntMatrix& y) {
            out.push_back(Embedding::make(s, t, y));
            return limit == 0 || out.size() < limit;
        },
        true);
    search.run(IntMatrix(s.rank(), t.rank()), 0);
    return out;
}

std::optional<Embedding> extend_representation(const GramMatrix& s, const Embedding& sigma, const GramMatrix& t_m,
                                               const IntMatrix& glue) {
    require_positive_definite(s);
    require_positive_definite(t_m);
    const std::size_t m = t_m.rank(), k = sigma.source.rank();
    if (!(sigma.target == s)) throw ArgumentError("sigma does not map into S");
    if (glue.rows() != m || glue.cols() != k) throw ArgumentError("glue matrix has the wrong shape");
    if (!(t_m.congruent(glue) == sigma.source)) throw ArgumentError("glue does not embed R into M isometrically");

    // U G V = D: in the basis f = columns of U^{-1}, R is spanned by d_i f_i (after V).
    SmithForm sf = smith_normal_form(glue);
    IntMatrix uinv = unimodular_inverse(sf.u);
    IntMatrix xr_v = sigma.x * sf.v;
    const std::size_t n = s.rank();
    IntMatrix y(n, m);
    for (std::size_t i = 0; i < k; ++i) {
        const Integer& d = sf.divisors[i];
        if (d == 0) throw DegenerateError("glue columns are linearly dependent");
        for (std::size_t r = 0; r < n; ++r) {
            if (xr_v(r, i) % d != 0) return std::nullopt;
            y(r, i) = xr_v(r, i) / d;
        }
    }
    GramMatrix t_f = t_m.congruent(uinv);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (s.b(y.column(i), y.column(j)) != t_f(i, j)) return std::nullopt;

    std::optional<Embedding> found;
    ColumnSearch search(
        s, t_f, [](const IntMatrix&, std::size_t) { return true; },
        [&](const IntMatrix& full) {
            IntMatrix tau = full * sf.u;
            if (!(tau * glue == sigma.x)) return true;
            found = Embedding::make(s, t_m, tau);
            return false;
        },
        false);
    search.run(y, k);
    return found;
}

std::optional<Superlattice> search_primitive_superlattice(const GramMatrix& s, const GramMatrix& m, const Integer& c1,
                                                          const Integer& index_bound) {
    require_positive_definite(s);
    require_positive_definite(m);
    if (index_bound < 1) throw ArgumentError("index bound must be positive");
    const std::size_t k = m.rank();

    // State: K with columns index * (basis of M' in M coordinates).
    struct State {
        IntMatrix basis;
        Integer index;
    };
    std::multimap<Integer, State> queue;
    std::set<std::pair<Integer, std::vector<Integer>>> seen;
    auto key_of = [&](const State& st) {
        std::vector<Integer> flat;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) flat.push_back(st.basis(i, j));
        return std::make_pair(st.index, flat);
    };
    State root{IntMatrix::identity(k), 1};
    seen.insert(key_of(root));
    queue.emplace(1, root);

    while (!queue.empty()) {
        State st = queue.begin()->second;
        queue.erase(queue.begin());
        const Integer idx2 = st.index * st.index;
        IntMatrix raw = st.basis.transpose() * m.matrix() * st.basis;
        IntMatrix d(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) d(i, j) = raw(i, j) / idx2;
        GramMatrix gd(d);

        if (lattice_minimum(gd) >= c1 && represents_locally_everywhere(s, gd, 1).all_representable()) {
            RMat kinv = rational_inverse(st.basis);
            IntMatrix inc(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    Rational e = kinv[i][j] * st.index;
                    if (e.get_den() != 1) throw Error("superlattice inclusion is not integral");
                    inc(i, j) = e.get_num();
                }
            return Superlattice{gd, inc, st.index};
        }

        for (Integer ell = 2; st.index * ell <= index_bound; ++ell) {
            if (!is_prime(ell)) continue;
            const Integer ell2 = ell * ell;
            // projective points y over F_ell with first nonzero coordinate 1
            IntVector y(k, 0);
            for (std::size_t lead = 0; lead < k; ++lead) {
                std::fill(y.begin(), y.end(), 0);
                y[lead] = 1;
                while (true) {
                    IntVector dy = d * y;
                    bool ok = true;
                    for (const auto& e : dy)
                        if (e % ell != 0) ok = false;
                    if (ok && gd.q(y) % ell2 == 0) {
                        IntMatrix gens(k, k + 1);
                        for (std::size_t i = 0; i < k; ++i) {
                            gens(i, i) = ell;
                            gens(i, k) = y[i];
                        }
                        IntMatrix h = lattice_basis(gens);
                        State next{lattice_basis(st.basis * h), st.index * ell};
                        if (seen.insert(key_of(next)).second) queue.emplace(next.index, next);
                    }
                    std::size_t pos = lead + 1;
                    for (; pos < k; ++pos) {
                        y[pos] += 1;
                        if (y[pos] < ell) break;
                        y[pos] = 0;
                    }
                    if (pos >= k) break;
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace quadrep
