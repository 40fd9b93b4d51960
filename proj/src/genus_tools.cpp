#include "quadrep/genus_tools.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "quadrep/local_invariants.hpp"

namespace quadrep {

Fingerprint fingerprint(const GramMatrix& s) {
    Fingerprint f;
    f.det = det(s);
    f.minimum = lattice_minimum(s);
    auto rep = short_vectors(s, 2 * f.minimum);
    f.minimal_vectors = 2 * rep.count_with_norm(f.minimum);
    f.up_to_twice_minimum = 2 * rep.vectors.size();
    return f;
}

namespace {

Integer dot(const IntVector& a, const IntVector& b) {
    Integer r = 0;
    for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

// Backtracking for W with tW S2 W = S1 and W a = b, mapping an LLL basis of S1 onto vectors of S2.
class IsometrySearch {
  public:
    IsometrySearch(const GramMatrix& s1, const GramMatrix& s2, const IntMatrix& a, const IntMatrix& b)
        : s1_(s1), s2_(s2), a_(a), b_(b), n_(s1.rank()) {}

    std::optional<IntMatrix> run() {
        if (s2_.rank() != n_) throw ArgumentError("isometry search: rank mismatch");
        if (n_ == 0) return IntMatrix(0, 0);
        if (det(s1_) != det(s2_)) return std::nullopt;
        LllResult red = lll_reduce(s1_);
        u1_ = red.transform;
        g1_ = red.reduced.matrix();
        // required B2(v_k, b_i) = B1(u1_k, a_i)
        IntMatrix ta = u1_.transpose() * s1_.matrix() * a_;
        extra_targets_ = ta;
        s2b_ = s2_.matrix() * b_;
        for (std::size_t k = 0; k < n_; ++k) {
            const Integer& norm = g1_(k, k);
            if (candidates_.count(norm)) continue;
            auto rep = vectors_of_norm(s2_, norm);
            auto& list = candidates_[norm];
            for (const auto& v : rep.vectors) {
                list.push_back(v);
                IntVector w = v;
                for (auto& e : w) e = -e;
                list.push_back(w);
            }
        }
        chosen_.clear();
        chosen_s_.clear();
        if (step(0)) return result_;
        return std::nullopt;
    }

  private:
    bool step(std::size_t k) {
        if (k == n_) return finish();
        const auto& list = candidates_.at(g1_(k, k));
        const bool first_sign_only = k == 0 && a_.cols() == 0;
        for (std::size_t idx = 0; idx < list.size(); ++idx) {
            if (first_sign_only && idx % 2 == 1) continue;
            const IntVector& v = list[idx];
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i)
                if (dot(chosen_s_[i], v) != g1_(i, k)) ok = false;
            for (std::size_t i = 0; i < a_.cols() && ok; ++i) {
                Integer p = 0;
                for (std::size_t r = 0; r < n_; ++r) p += v[r] * s2b_(r, i);
                if (p != extra_targets_(k, i)) ok = false;
            }
            if (!ok) continue;
            chosen_.push_back(v);
            chosen_s_.push_back(s2_.matrix() * v);
            if (step(k + 1)) return true;
            chosen_.pop_back();
            chosen_s_.pop_back();
        }
        return false;
    }

    bool finish() {
        IntMatrix v = IntMatrix::from_columns(chosen_, n_);
        IntMatrix w = v * unimodular_inverse(u1_);
        if (!(s2_.congruent(w) == s1_)) return false;
        if (!(w * a_ == b_)) return false;
        result_ = w;
        return true;
    }

    const GramMatrix& s1_;
    const GramMatrix& s2_;
    const IntMatrix& a_;
    const IntMatrix& b_;
    std::size_t n_;
    IntMatrix u1_, g1_, extra_targets_, s2b_;
    std::map<Integer, std::vector<IntVector>> candidates_;
    std::vector<IntVector> chosen_, chosen_s_;
    IntMatrix result_;
};

void require_pd(const GramMatrix& s) {
    if (!is_positive_definite(s)) throw ArgumentError("Gram matrix is not positive definite");
}

}  // namespace

std::optional<IntMatrix> find_isometry(const GramMatrix& s1, const GramMatrix& s2) {
    if (s1.rank() != s2.rank()) throw ArgumentError("is_isometric: rank mismatch");
    require_pd(s1);
    require_pd(s2);
    const std::size_t n = s1.rank();
    IntMatrix none(n, 0);
    // W maps S1 coordinates to S2 coordinates with tW S2 W = S1; the answer is its inverse.
    auto w = IsometrySearch(s1, s2, none, none).run();
    if (!w) return std::nullopt;
    return unimodular_inverse(*w);
}

bool is_isometric(const GramMatrix& s1, const GramMatrix& s2) {
    if (s1.rank() != s2.rank()) throw ArgumentError("is_isometric: rank mismatch");
    if (det(s1) != det(s2)) return false;
    if (fingerprint(s1) != fingerprint(s2)) return false;
    return find_isometry(s1, s2).has_value();
}

std::optional<IntMatrix> find_automorphism_mapping(const GramMatrix& s, const IntMatrix& a, const IntMatrix& b) {
    require_pd(s);
    if (a.rows() != s.rank() || b.rows() != s.rank() || a.cols() != b.cols())
        throw ArgumentError("automorphism search: shape mismatch");
    if (!(s.congruent(a) == s.congruent(b))) return std::nullopt;
    return IsometrySearch(s, s, a, b).run();
}

std::vector<Embedding> dedup_under_automorphisms(const GramMatrix& s, const std::vector<Embedding>& embeddings) {
    std::vector<Embedding> kept;
    for (const auto& e : embeddings) {
        bool seen = false;
        for (const auto& k : kept)
            if (find_automorphism_mapping(s, k.x, e.x)) {
                seen = true;
                break;
            }
        if (!seen) kept.push_back(e);
    }
    return kept;
}

Integer spinor_norm_reflection(const GramMatrix& s, const IntVector& v) {
    Integer q = s.q(v);
    if (q == 0) throw DegenerateError("reflection in an isotropic vector");
    return square_class(Rational(q));
}

Integer spinor_norm_of_reflections(const GramMatrix& s, const std::vector<IntVector>& vs) {
    Integer prod = 1;
    for (const auto& v : vs) prod *= spinor_norm_reflection(s, v);
    return square_class(Rational(prod));
}

namespace {

Integer mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

void require_neighbor_prime(const GramMatrix& s, const Integer& p) {
    require_pd(s);
    if (!is_prime(p) || p == 2) throw ArgumentError("neighbor prime must be an odd prime");
    if (det(s) % p == 0) throw ArgumentError("neighbor prime divides det S");
}

// Gram of the p-neighbor L_x + Z x/p for an isotropic x mod p.
GramMatrix neighbor_gram(const GramMatrix& s, IntVector x, const Integer& p) {
    const std::size_t n = s.rank();
    const Integer p2 = p * p;
    IntVector sx = s.matrix() * x;
    std::size_t i0 = n;
    for (std::size_t i = 0; i < n; ++i)
        if (mod(sx[i], p) != 0) {
            i0 = i;
            break;
        }
    if (i0 == n) throw Error("neighbor construction: S x vanishes mod p");
    // Q(x + p t e_i0) = Q(x) + 2 p t (Sx)_i0 mod p^2
    Integer qx = s.q(x);
    if (mod(qx, p2) != 0) {
        Integer inv;
        Integer twice = mod(2 * sx[i0], p);
        mpz_invert(inv.get_mpz_t(), twice.get_mpz_t(), p.get_mpz_t());
        Integer t = mod(-(qx / p) * inv, p);
        x[i0] += p * t;
        sx = s.matrix() * x;
    }
    // L_x = {y : tx S y = 0 mod p}; generators of p * neighbor: p * basis(L_x) and x
    Integer inv;
    Integer lead = mod(sx[i0], p);
    mpz_invert(inv.get_mpz_t(), lead.get_mpz_t(), p.get_mpz_t());
    IntMatrix gens(n, n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i0) {
            gens(i0, j) = p * p;
        } else {
            gens(j, j) = p;
            gens(i0, j) = -p * mod(sx[j] * inv, p);
        }
    }
    for (std::size_t r = 0; r < n; ++r) gens(r, n) = x[r];
    IntMatrix h = lattice_basis(gens);
    IntMatrix raw = h.transpose() * s.matrix() * h;
    IntMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (raw(i, j) % p2 != 0) throw Error("neighbor construction: Gram not integral");
            g(i, j) = raw(i, j) / p2;
        }
    return lll_reduce(GramMatrix(g)).reduced;
}

std::vector<Integer> key_primes(const GramMatrix& s, const Integer& p) {
    std::vector<Integer> ps{2, p};
    for (const auto& q : prime_factors(det(s))) ps.push_back(q);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

struct ClassIndex {
    std::vector<GramMatrix> classes;
    std::vector<Fingerprint> prints;

    // index of an isometric class, or classes.size()
    std::size_t find(const GramMatrix& g, const Fingerprint& f) const {
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (prints[i] == f && find_isometry(classes[i], g)) return i;
        return classes.size();
    }
};

}  // namespace

std::vector<GramMatrix> p_neighbors(const GramMatrix& s, const Integer& p) {
    require_neighbor_prime(s, p);
    const std::size_t n = s.rank();
    const auto primes = key_primes(s, p);
    std::vector<std::vector<std::vector<long>>> keys;
    for (const auto& q : primes) keys.push_back(local_genus_key(s, q));

    ClassIndex found;
    IntVector x(n, 0);
    for (std::size_t lead = 0; lead < n; ++lead) {
        std::fill(x.begin(), x.end(), 0);
        x[lead] = 1;
        while (true) {
            if (mod(s.q(x), p) == 0) {
                GramMatrix g = neighbor_gram(s, x, p);
                for (std::size_t i = 0; i < primes.size(); ++i)
                    if (local_genus_key(g, primes[i]) != keys[i])
                        throw Error("neighbor left the genus at p = " + primes[i].get_str());
                Fingerprint f = fingerprint(g);
                if (found.find(g, f) == found.classes.size()) {
                    found.classes.push_back(g);
                    found.prints.push_back(f);
                }
            }
            std::size_t pos = lead + 1;
            for (; pos < n; ++pos) {
                x[pos] += 1;
                if (x[pos] < p) break;
                x[pos] = 0;
            }
            if (pos >= n) break;
        }
    }
    return found.classes;
}

Integer default_neighbor_prime(const GramMatrix& s, const Integer& avoid) {
    const Integer d = det(s);
    for (Integer p = 3;; p += 2)
        if (is_prime(p) && d % p != 0 && p != avoid) return p;
}

GenusRecord enumerate_genus(const GramMatrix& s, const Integer& p, std::size_t class_cap, bool use_extra_prime) {
    require_pd(s);
    if (class_cap == 0) throw ArgumentError("class_cap must be positive");
    GenusRecord rec;
    rec.seed = s;
    rec.prime_used = p == 0 ? default_neighbor_prime(s) : Integer(p);
    require_neighbor_prime(s, rec.prime_used);

    ClassIndex index;
    GramMatrix first = lll_reduce(s).reduced;
    index.classes.push_back(first);
    index.prints.push_back(fingerprint(first));

    std::set<std::pair<std::size_t, std::size_t>> edges;
    bool capped = false;
    auto close_under = [&](const Integer& prime) {
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < index.classes.size(); ++i) queue.push_back(i);
        while (!queue.empty() && !capped) {
            std::size_t from = queue.front();
            queue.pop_front();
            for (const auto& g : p_neighbors(index.classes[from], prime)) {
                Fingerprint f = fingerprint(g);
                std::size_t to = index.find(g, f);
                if (to == index.classes.size()) {
                    if (index.classes.size() >= class_cap) {
                        capped = true;
                        break;
                    }
                    index.classes.push_back(g);
                    index.prints.push_back(f);
                    queue.push_back(to);
                }
                edges.insert({from, to});
            }
        }
    };
    close_under(rec.prime_used);
    if (use_extra_prime && !capped) {
        rec.extra_prime = default_neighbor_prime(s, rec.prime_used);
        close_under(*rec.extra_prime);
    }
    rec.classes = index.classes;
    rec.fingerprints = index.prints;
    rec.edges.assign(edges.begin(), edges.end());
    rec.complete = !capped;
    return rec;
}

std::vector<ClassRepresentation> represented_by_all_classes(const GenusRecord& g, const GramMatrix& t,
                                                            const Integer& c) {
    if (!g.complete) throw ArgumentError("represented_by_all_classes: genus record is incomplete");
    std::vector<ClassRepresentation> out;
    for (std::size_t i = 0; i < g.classes.size(); ++i) {
        ClassRepresentation cr;
        cr.class_index = i;
        auto found = find_representations(g.classes[i], t, c, 1);
        if (!found.empty()) {
            cr.represented = true;
            cr.witness = found.front();
        }
        out.push_back(std::move(cr));
    }
    return out;
}

}  // namespace quadrep
