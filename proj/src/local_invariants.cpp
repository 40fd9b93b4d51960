#include "quadrep/local_invariants.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace quadrep {

bool is_prime(const Integer& p) {
    if (p < 2) return false;
    return mpz_probab_prime_p(p.get_mpz_t(), 40) > 0;
}

Place Place::finite(const Integer& p) {
    if (!is_prime(p)) throw ArgumentError("not a prime: " + p.get_str());
    Place v;
    v.prime_ = p;
    return v;
}

std::string Place::to_string() const { return is_infinite() ? "inf" : prime_.get_str(); }

std::vector<Integer> prime_factors(const Integer& n) {
    if (n == 0) throw DegenerateError("prime_factors of zero");
    Integer m = abs(n);
    std::vector<Integer> out;
    for (Integer d = 2; d * d <= m; d += (d == 2 ? 1 : 2)) {
        if (m % d == 0) {
            out.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) out.push_back(m);
    return out;
}

int ord_p(const Integer& a, const Integer& p) {
    if (a == 0) throw DegenerateError("valuation of zero is infinite");
    return static_cast<int>(mpz_remove(Integer().get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()));
}

int ord_p(const Rational& a, const Integer& p) {
    if (a == 0) throw DegenerateError("valuation of zero is infinite");
    return ord_p(a.get_num(), p) - ord_p(a.get_den(), p);
}

Integer square_class(const Rational& a) {
    if (a == 0) throw DegenerateError("square class of zero");
    Integer m = a.get_num() * a.get_den();
    Integer out = m < 0 ? -1 : 1;
    for (const auto& q : prime_factors(m))
        if (ord_p(m, q) % 2 != 0) out *= q;
    return out;
}

namespace {

// Unit part u of a = p^k u, as an integer (numerator times denominator, both coprime to p).
Integer unit_part(const Rational& a, const Integer& p) {
    Integer num = a.get_num(), den = a.get_den();
    mpz_remove(num.get_mpz_t(), num.get_mpz_t(), p.get_mpz_t());
    mpz_remove(den.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
    return num * den;  // same square class as num/den
}

int legendre(const Integer& u, const Integer& p) { return mpz_legendre(u.get_mpz_t(), p.get_mpz_t()); }

int mod8(const Integer& u) {
    Integer r;
    mpz_fdiv_r_ui(r.get_mpz_t(), u.get_mpz_t(), 8);
    return static_cast<int>(r.get_si());
}

}  // namespace

bool is_local_square(const Rational& a, const Place& v) {
    if (a == 0) throw DegenerateError("square test on zero");
    if (v.is_infinite()) return a > 0;
    const Integer& p = v.prime();
    if (ord_p(a, p) % 2 != 0) return false;
    Integer u = unit_part(a, p);
    if (p == 2) return mod8(u) == 1;
    return legendre(u, p) == 1;
}

int hilbert_symbol(const Rational& a, const Rational& b, const Place& v) {
    if (a == 0 || b == 0) throw DegenerateError("Hilbert symbol of zero");
    if (v.is_infinite()) return (a < 0 && b < 0) ? -1 : 1;
    const Integer& p = v.prime();
    const int alpha = ord_p(a, p), beta = ord_p(b, p);
    const Integer u = unit_part(a, p), w = unit_part(b, p);
    if (p == 2) {
        const int u8 = mod8(u), w8 = mod8(w);
        auto eps = [](int x) { return ((x - 1) / 2) & 1; };
        auto omega = [](int x) { return ((x * x - 1) / 8) & 1; };
        int e = eps(u8) * eps(w8) + alpha * omega(w8) + beta * omega(u8);
        return (e & 1) ? -1 : 1;
    }
    int s = 1;
    // (-1)^{alpha beta eps(p)}
    if ((alpha & 1) && (beta & 1) && mod8(p) % 4 == 3) s = -s;
    if (beta & 1) s *= legendre(u, p);
    if (alpha & 1) s *= legendre(w, p);
    return s;
}

int hasse_invariant(const std::vector<Rational>& d, const Place& v) {
    int h = 1;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) h *= hilbert_symbol(d[i], d[j], v);
    return h;
}

int SpaceInvariants::hasse_at(const Place& v) const {
    if (v.is_infinite()) return hasse_infinity;
    auto it = hasse.find(v.prime());
    return it == hasse.end() ? 1 : it->second;
}

std::vector<Integer> SpaceInvariants::relevant_primes() const {
    std::set<Integer> ps{Integer(2)};
    for (const auto& [p, h] : hasse) ps.insert(p);
    for (const auto& p : prime_factors(det_class)) ps.insert(p);
    return {ps.begin(), ps.end()};
}

SpaceInvariants space_invariants_of_diagonal(const std::vector<Rational>& d) {
    SpaceInvariants inv;
    inv.rank = d.size();
    Rational prod = 1;
    std::set<Integer> primes{Integer(2)};
    for (const auto& x : d) {
        if (x == 0) throw DegenerateError("space_invariants: singular form");
        prod *= x;
        (x > 0 ? inv.positive : inv.negative)++;
        for (const auto& p : prime_factors(x.get_num() * x.get_den())) primes.insert(p);
    }
    inv.det_class = square_class(prod);
    for (const auto& p : primes) inv.hasse[p] = hasse_invariant(d, Place::finite(p));
    inv.hasse_infinity = hasse_invariant(d, Place::infinity());
    return inv;
}

SpaceInvariants space_invariants(const GramMatrix& s) {
    const Integer dt = det(s);
    if (dt == 0) throw DegenerateError("space_invariants: singular form");
    auto d = diagonalize_over_q(s);
    SpaceInvariants inv;
    inv.rank = s.rank();
    inv.det_class = square_class(Rational(dt));
    std::set<Integer> primes{Integer(2)};
    for (const auto& p : prime_factors(dt)) primes.insert(p);
    for (const auto& p : primes) inv.hasse[p] = hasse_invariant(d, Place::finite(p));
    inv.hasse_infinity = hasse_invariant(d, Place::infinity());
    for (const auto& x : d) (x > 0 ? inv.positive : inv.negative)++;
    return inv;
}

LocalSpace localize(const SpaceInvariants& inv, const Place& v) {
    LocalSpace ls;
    ls.rank = inv.rank;
    ls.det = inv.det_class;
    ls.hasse = inv.hasse_at(v);
    ls.positive = inv.positive;
    ls.negative = inv.negative;
    return ls;
}

bool is_isotropic(const LocalSpace& s, const Place& v) {
    if (v.is_infinite()) return s.positive > 0 && s.negative > 0;
    switch (s.rank) {
        case 0:
        case 1:
            return false;
        case 2:
            return is_local_square(-s.det, v);
        case 3:
            return s.hasse == hilbert_symbol(Rational(-1), -s.det, v);
        case 4:
            return !(is_local_square(s.det, v) && s.hasse == -hilbert_symbol(Rational(-1), Rational(-1), v));
        default:
            return true;
    }
}

bool is_isotropic(const SpaceInvariants& inv, const Place& v) { return is_isotropic(localize(inv, v), v); }

bool local_space_exists(const LocalSpace& s, const Place& v) {
    if (v.is_infinite()) {
        if (s.positive + s.negative != s.rank) return false;
        const bool neg_det = s.negative % 2 == 1;
        if ((s.det < 0) != neg_det) return false;
        // Hasse at the real place: (-1,-1) per pair of negative entries
        const std::size_t pairs = s.negative * (s.negative - (s.negative ? 1 : 0)) / 2;
        return s.hasse == ((pairs % 2) ? -1 : 1);
    }
    switch (s.rank) {
        case 0:
            return is_local_square(s.det, v) && s.hasse == 1;
        case 1:
            return s.hasse == 1;
        case 2:
            return !(is_local_square(-s.det, v) && s.hasse == -1);
        default:
            return true;
    }
}

LocalSpace complement_space(const LocalSpace& sub, const LocalSpace& ambient, const Place& v) {
    if (sub.rank > ambient.rank) throw ArgumentError("complement_space: subspace rank exceeds ambient rank");
    LocalSpace c;
    c.rank = ambient.rank - sub.rank;
    c.det = ambient.det / sub.det;
    // hasse(V) = hasse(W) hasse(W^perp) (det W, det W^perp)
    c.hasse = ambient.hasse * sub.hasse * hilbert_symbol(sub.det, c.det, v);
    c.positive = ambient.positive >= sub.positive ? ambient.positive - sub.positive : 0;
    c.negative = ambient.negative >= sub.negative ? ambient.negative - sub.negative : 0;
    return c;
}

bool space_represents(const SpaceInvariants& target, const SpaceInvariants& ambient, const Place& v) {
    if (target.rank > ambient.rank) throw ArgumentError("space_represents: target rank exceeds ambient rank");
    if (v.is_infinite() && (target.positive > ambient.positive || target.negative > ambient.negative)) return false;
    LocalSpace t = localize(target, v), a = localize(ambient, v);
    LocalSpace c = complement_space(t, a, v);
    return local_space_exists(c, v);
}

namespace {

using RMat = std::vector<std::vector<Rational>>;

Integer reduce_mod(const Rational& x, const Integer& modulus) {
    Integer den_inv;
    Integer den = x.get_den();
    if (mpz_invert(den_inv.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t()) == 0)
        throw DegenerateError("reduce_mod: denominator not invertible");
    Integer r = x.get_num() * den_inv;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
    return r;
}

int ord_or_max(const Rational& x, const Integer& p) { return x == 0 ? INT32_MAX : ord_p(x, p); }

struct RawBlock {
    int scale;
    std::vector<std::vector<Rational>> entries;  // 1x1 or 2x2, divided by p^scale
};

}  // namespace

JordanSplitting jordan_decomposition(const GramMatrix& s, const Integer& p) {
    if (!is_prime(p)) throw ArgumentError("jordan_decomposition: not a prime");
    const Integer dt = det(s);
    if (dt == 0) throw DegenerateError("jordan_decomposition: singular form");
    const std::size_t n = s.rank();
    RMat a(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = s(i, j);

    // basis change b_i <- b_i + f b_j as a congruence on a
    auto add = [&](std::size_t i, std::size_t j, const Rational& f) {
        for (std::size_t r = 0; r < n; ++r) a[r][i] += f * a[r][j];
        for (std::size_t c = 0; c < n; ++c) a[i][c] += f * a[j][c];
    };

    std::vector<bool> done(n, false);
    std::vector<RawBlock> blocks;
    std::size_t remaining = n;
    while (remaining > 0) {
        int vmin = INT32_MAX;
        std::size_t di = n, oi = n, oj = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            for (std::size_t j = i; j < n; ++j) {
                if (done[j]) continue;
                int v = ord_or_max(a[i][j], p);
                if (v < vmin) {
                    vmin = v;
                    di = oi = oj = n;
                }
                if (v == vmin) {
                    if (i == j && di == n) di = i;
                    if (i != j && oi == n) {
                        oi = i;
                        oj = j;
                    }
                }
            }
        }
        if (di == n && p != 2) {
            add(oi, oj, Rational(1));
            di = oi;
        }
        Integer pv;
        mpz_pow_ui(pv.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(vmin));
        if (di != n) {
            for (std::size_t r = 0; r < n; ++r)
                if (!done[r] && r != di && a[r][di] != 0) add(r, di, Rational(-a[r][di] / a[di][di]));
            blocks.push_back({vmin, {{a[di][di] / pv}}});
            done[di] = true;
            --remaining;
        } else {
            const std::size_t i = oi, j = oj;
            const Rational dd = a[i][i] * a[j][j] - a[i][j] * a[i][j];
            // inverse of [[a_ii, a_ij], [a_ij, a_jj]]
            const Rational inv00 = a[j][j] / dd, inv01 = -a[i][j] / dd, inv11 = a[i][i] / dd;
            for (std::size_t r = 0; r < n; ++r) {
                if (done[r] || r == i || r == j) continue;
                const Rational fi = inv00 * a[r][i] + inv01 * a[r][j];
                const Rational fj = inv01 * a[r][i] + inv11 * a[r][j];
                if (fi != 0) add(r, i, Rational(-fi));
                if (fj != 0) add(r, j, Rational(-fj));
            }
            blocks.push_back({vmin, {{a[i][i] / pv, a[i][j] / pv}, {a[i][j] / pv, a[j][j] / pv}}});
            done[i] = done[j] = true;
            remaining -= 2;
        }
    }

    JordanSplitting js;
    js.prime = p;
    js.precision = static_cast<unsigned>(ord_p(dt, p)) + 3;
    Integer modulus;
    mpz_pow_ui(modulus.get_mpz_t(), p.get_mpz_t(), js.precision);

    std::stable_sort(blocks.begin(), blocks.end(), [](const RawBlock& x, const RawBlock& y) { return x.scale < y.scale; });
    std::size_t k = 0;
    while (k < blocks.size()) {
        std::size_t e = k;
        std::size_t r = 0;
        bool odd = false;
        while (e < blocks.size() && blocks[e].scale == blocks[k].scale) {
            r += blocks[e].entries.size();
            if (blocks[e].entries.size() == 1) odd = true;
            ++e;
        }
        IntMatrix u(r, r);
        std::size_t off = 0;
        for (std::size_t b = k; b < e; ++b) {
            const auto& ent = blocks[b].entries;
            for (std::size_t x = 0; x < ent.size(); ++x)
                for (std::size_t y = 0; y < ent.size(); ++y) u(off + x, off + y) = reduce_mod(ent[x][y], modulus);
            off += ent.size();
        }
        js.components.push_back({blocks[k].scale, r, GramMatrix(std::move(u)), p == 2 ? odd : true});
        k = e;
    }
    return js;
}

GramMatrix reassemble(const JordanSplitting& js) {
    std::size_t n = 0;
    for (const auto& c : js.components) n += c.rank;
    IntMatrix m(n, n);
    std::size_t off = 0;
    for (const auto& c : js.components) {
        Integer pv;
        mpz_pow_ui(pv.get_mpz_t(), js.prime.get_mpz_t(), static_cast<unsigned long>(c.scale));
        for (std::size_t i = 0; i < c.rank; ++i)
            for (std::size_t j = 0; j < c.rank; ++j) m(off + i, off + j) = pv * c.unit_block(i, j);
        off += c.rank;
    }
    return GramMatrix(std::move(m));
}

std::vector<std::vector<long>> local_genus_key(const GramMatrix& s, const Integer& p) {
    const JordanSplitting js = jordan_decomposition(s, p);
    std::vector<std::vector<long>> key;
    for (const auto& c : js.components) {
        std::vector<long> row{c.scale, static_cast<long>(c.rank)};
        if (p == 2) {
            row.push_back(c.odd ? 1 : 0);
        } else {
            row.push_back(legendre(det(c.unit_block), p));
        }
        key.push_back(std::move(row));
    }
    if (p == 2) {
        // the 2-adic component data above is not a complete invariant; add the space data at 2
        const auto inv = space_invariants(s);
        const Place two = Place::finite(2);
        const Rational d(inv.det_class);
        key.push_back({ord_p(d, Integer(2)) % 2L, static_cast<long>(mod8(unit_part(d, Integer(2)))),
                       static_cast<long>(inv.hasse_at(two))});
    }
    return key;
}

}  // namespace quadrep
