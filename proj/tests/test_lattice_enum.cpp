#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "quadrep/lattice_enum.hpp"

using namespace quadrep;

namespace {

IntMatrix random_full_rank(std::size_t n, std::size_t m, int bound, std::mt19937& rng) {
    std::uniform_int_distribution<int> e(-bound, bound);
    while (true) {
        IntMatrix x(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) x(i, j) = e(rng);
        if (rank(x) == m) return x;
    }
}

// Whether v lies in the Z-span of the columns of x (full column rank), by exact rational solve.
bool in_image(const IntMatrix& x, const IntVector& v) {
    const std::size_t n = x.rows(), m = x.cols();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(m + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) a[i][j] = x(i, j);
        a[i][m] = v[i];
    }
    std::size_t row = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t p = row;
        while (p < n && a[p][col] == 0) ++p;
        if (p == n) return false;
        std::swap(a[p], a[row]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || a[i][col] == 0) continue;
            Rational f = a[i][col] / a[row][col];
            for (std::size_t k = col; k <= m; ++k) a[i][k] -= f * a[row][k];
        }
        pivots.push_back(col);
        ++row;
    }
    for (std::size_t i = row; i < n; ++i)
        if (a[i][m] != 0) return false;
    for (std::size_t i = 0; i < m; ++i) {
        Rational sol = a[i][m] / a[i][i];
        if (sol.get_den() != 1) return false;
    }
    return true;
}

// Smallest c with c * (QX ∩ Z^n) inside XZ^m.
Integer smallest_saturation_multiple(const IntMatrix& x) {
    IntMatrix sat = saturate(x);
    for (Integer c = 1;; ++c) {
        bool all = true;
        for (std::size_t j = 0; j < sat.cols() && all; ++j) {
            IntVector v = sat.column(j);
            for (auto& e : v) e *= c;
            all = in_image(x, v);
        }
        if (all) return c;
    }
}

// Brute-force count of X (up to X -> -X) with tXSX = T and imprimitivity dividing c.
std::size_t naive_representation_count(const GramMatrix& s, const GramMatrix& t, const Integer& c) {
    const std::size_t m = t.rank();
    Integer top = 0;
    for (std::size_t i = 0; i < m; ++i) top = std::max(top, t(i, i));
    auto half = oracle::box_vectors(s, 1, top);
    std::vector<IntVector> all;
    for (const auto& v : half) {
        all.push_back(v);
        IntVector w = v;
        for (auto& e : w) e = -e;
        all.push_back(w);
    }
    std::size_t count = 0;
    std::vector<IntVector> cols(m);
    auto rec = [&](auto&& self, std::size_t j) -> void {
        if (j == m) {
            IntMatrix x = IntMatrix::from_columns(cols, s.rank());
            if (c % oracle::smith_by_minors(x).back() == 0) ++count;
            return;
        }
        for (const auto& v : all) {
            if (j == 0 && !oracle::sign_canonical(v)) continue;
            bool ok = oracle::quad(s, v) == t(j, j);
            for (std::size_t i = 0; i < j && ok; ++i) ok = s.b(cols[i], v) == t(i, j);
            if (!ok) continue;
            cols[j] = v;
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    return count;
}

}  // namespace

TEST_CASE("LLL reduction") {
    auto r = lll_reduce(GramMatrix{{4, 2}, {2, 2}});
    CHECK(r.reduced(0, 0) == 2);
    CHECK(r.reduced(1, 1) == 2);
    CHECK(det(r.reduced) == 4);
    CHECK(abs(det(r.transform)) == 1);
    CHECK(r.reduced == GramMatrix{{4, 2}, {2, 2}}.congruent(r.transform));
}

TEST_CASE("LLL output is congruent, reduced in size, and keeps the determinant") {
    std::mt19937 rng(71);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + trial % 6;
        GramMatrix s = oracle::random_unimodular_congruent(oracle::random_positive_definite(n, 3, rng), rng, 12);
        auto r = lll_reduce(s);
        CHECK(r.reduced == s.congruent(r.transform));
        CHECK(abs(det(r.transform)) == 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) CHECK(2 * abs(r.reduced(i, j)) <= r.reduced(j, j) + r.reduced(i, i));
    }
}

TEST_CASE("minimum and vectors of a given norm") {
    CHECK(lattice_minimum(oracle::e8()) == 2);
    CHECK(lattice_minimum(GramMatrix::diagonal(std::vector<long>{5, 7})) == 5);
    CHECK(lattice_minimum(GramMatrix{{2, 1}, {1, 2}}) == 2);
    CHECK(vectors_of_norm(GramMatrix::identity(4), 2).vectors.size() == 12);
    CHECK(vectors_of_norm(oracle::e8(), 2).vectors.size() == 120);
    CHECK(vectors_of_norm(GramMatrix::identity(3), 7).vectors.empty());
    auto sv = short_vectors(GramMatrix::identity(2), 2);
    CHECK(sv.vectors.size() == 4);
    CHECK(sv.minimum == 1);
    CHECK(sv.count_with_norm(2) == 2);
    CHECK(sv.vectors.front() == IntVector{1, 0});
}

TEST_CASE("minimum is a congruence invariant") {
    std::mt19937 rng(73);
    for (int trial = 0; trial < 40; ++trial) {
        GramMatrix s = oracle::random_positive_definite(1 + trial % 5, 3, rng);
        CHECK(lattice_minimum(oracle::random_unimodular_congruent(s, rng, 10)) == lattice_minimum(s));
    }
}

TEST_CASE("short vectors match box enumeration") {
    std::mt19937 rng(79);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + trial % 4;
        GramMatrix s = oracle::random_positive_definite(n, 2, rng);
        Integer bound = lattice_minimum(s) + 6;
        auto got = short_vectors(s, bound).vectors;
        auto want = oracle::box_vectors(s, 1, bound);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

TEST_CASE("shifted enumeration visits exactly the lattice points in the shell") {
    GramMatrix s{{2, 1}, {1, 3}};
    ShortVectorEnumerator en(s);
    std::vector<Rational> center{Rational(1, 2), Rational(-1, 3)};
    std::vector<IntVector> got;
    en.for_each_shifted(center, 0, 9, [&](const IntVector& z, const Rational& value) {
        Rational q = 0;
        std::vector<Rational> y{z[0] + center[0], z[1] + center[1]};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) q += y[i] * s(i, j) * y[j];
        CHECK(q == value);
        got.push_back(z);
        return true;
    });
    std::vector<IntVector> want;
    for (long a = -10; a <= 10; ++a)
        for (long b = -10; b <= 10; ++b) {
            std::vector<Rational> y{a + center[0], b + center[1]};
            Rational q = 0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) q += y[i] * s(i, j) * y[j];
            if (q <= 9) want.push_back(IntVector{a, b});
        }
    std::sort(got.begin(), got.end());
    CHECK(got == want);
}

TEST_CASE("imprimitivity bound") {
    CHECK(imprimitivity_bound(IntMatrix{{1}, {0}}) == 1);
    CHECK(imprimitivity_bound(IntMatrix{{2}, {0}}) == 2);
    CHECK(imprimitivity_bound(IntMatrix{{2, 0}, {0, 3}, {0, 0}}) == 6);
    CHECK_THROWS(imprimitivity_bound(IntMatrix{{1, 2}, {2, 4}}));
}

TEST_CASE("the two imprimitivity definitions agree") {
    std::mt19937 rng(83);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + trial % 3, m = 1 + trial % (n - 1);
        IntMatrix x = random_full_rank(n, m, 4, rng);
        CHECK(imprimitivity_bound(x) == smallest_saturation_multiple(x));
    }
}

TEST_CASE("find representations examples") {
    CHECK(find_representations(GramMatrix::identity(3), GramMatrix::diagonal(std::vector<long>{6}), 1).size() == 12);
    CHECK(find_representations(GramMatrix::identity(2), GramMatrix::identity(2), 1).size() == 4);
    CHECK(find_representations(GramMatrix::identity(4), GramMatrix::identity(4), 1).size() == 192);
    CHECK(find_representations(GramMatrix::identity(3), GramMatrix::diagonal(std::vector<long>{7}), 7).empty());
    // 8 = 4 + 4: only imprimitive representations
    CHECK(find_representations(GramMatrix::identity(3), GramMatrix::diagonal(std::vector<long>{8}), 1).empty());
    CHECK(find_representations(GramMatrix::identity(3), GramMatrix::diagonal(std::vector<long>{8}), 2).size() == 6);
    CHECK(find_representations(GramMatrix::identity(4), GramMatrix::identity(4), 1, 5).size() == 5);
}

TEST_CASE("find representations matches brute force and returns valid embeddings") {
    std::mt19937 rng(89);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + trial % 3, m = 1 + trial % 2;
        GramMatrix s = oracle::random_positive_definite(n, 1, rng);
        IntMatrix x = random_full_rank(n, m, 1, rng);
        GramMatrix t = s.congruent(x);
        Integer c = 1 + trial % 3;
        auto reps = find_representations(s, t, c);
        for (const auto& e : reps) {
            CHECK(t == s.congruent(e.x));
            CHECK(c % e.imprimitivity_bound == 0);
            CHECK(oracle::sign_canonical(e.x.column(0)));
        }
        INFO("S=" << s.matrix() << " T=" << t.matrix() << " c=" << c);
        CHECK(reps.size() == naive_representation_count(s, t, c));
    }
}

TEST_CASE("embedding construction verifies the Gram") {
    CHECK_THROWS_AS(Embedding::make(GramMatrix::identity(2), GramMatrix::diagonal(std::vector<long>{2}),
                                    IntMatrix{{1}, {0}}),
                    ArgumentError);
    auto e = Embedding::make(GramMatrix::identity(2), GramMatrix::diagonal(std::vector<long>{4}), IntMatrix{{2}, {0}});
    CHECK(e.imprimitivity_bound == 2);
}

TEST_CASE("extension of representations") {
    GramMatrix r = GramMatrix::identity(1);
    GramMatrix m = GramMatrix::diagonal(std::vector<long>{1, 3});
    IntMatrix glue{{1}, {0}};

    auto s4 = GramMatrix::identity(4);
    auto sigma4 = Embedding::make(s4, r, IntMatrix{{1}, {0}, {0}, {0}});
    auto tau = extend_representation(s4, sigma4, m, glue);
    REQUIRE(tau.has_value());
    CHECK(s4.congruent(tau->x) == m);
    CHECK(tau->x.column(0) == sigma4.x.column(0));
    IntVector comp = tau->x.column(1);
    CHECK(comp[0] == 0);
    for (std::size_t i = 1; i < 4; ++i) CHECK(abs(comp[i]) == 1);

    auto s2 = GramMatrix::identity(2);
    auto sigma2 = Embedding::make(s2, r, IntMatrix{{1}, {0}});
    CHECK_FALSE(extend_representation(s2, sigma2, m, glue).has_value());

    auto same = extend_representation(s4, sigma4, r, IntMatrix{{1}});
    REQUIRE(same.has_value());
    CHECK(same->x == sigma4.x);

    CHECK_THROWS_AS(extend_representation(s4, sigma4, GramMatrix::diagonal(std::vector<long>{2, 3}), glue),
                    ArgumentError);
}

TEST_CASE("extensions restrict to sigma column-exactly") {
    std::mt19937 rng(97);
    int found = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 3 + trial % 3;
        GramMatrix s = oracle::random_positive_definite(n, 1, rng);
        IntMatrix x = random_full_rank(n, 2, 1, rng);
        GramMatrix m = s.congruent(x);
        // R = first basis vector of M, sigma = the first column of some representation of R
        GramMatrix r = GramMatrix::diagonal(IntVector{m(0, 0)});
        auto sig = Embedding::make(s, r, IntMatrix::from_columns({x.column(0)}, n));
        auto tau = extend_representation(s, sig, m, IntMatrix{{1}, {0}});
        REQUIRE(tau.has_value());  // x itself is an extension
        ++found;
        CHECK(tau->x.column(0) == x.column(0));
        CHECK(s.congruent(tau->x) == m);
    }
    CHECK(found == 40);
}

TEST_CASE("primitive superlattice search") {
    GramMatrix i8 = GramMatrix::identity(8);
    auto self = search_primitive_superlattice(i8, GramMatrix::diagonal(std::vector<long>{2, 2, 2}), 1, 8);
    REQUIRE(self.has_value());
    CHECK(self->index == 1);

    GramMatrix i3 = GramMatrix::identity(3);
    GramMatrix four = GramMatrix::diagonal(std::vector<long>{4});
    auto up = search_primitive_superlattice(i3, four, 1, 2);
    REQUIRE(up.has_value());
    CHECK(up->index == 2);
    CHECK(up->gram == GramMatrix::identity(1));
    CHECK(up->inclusion == IntMatrix{{2}});
    CHECK_FALSE(search_primitive_superlattice(i3, four, 1, 1).has_value());
    // minimum requirement blocks the overlattice
    CHECK_FALSE(search_primitive_superlattice(i3, four, 2, 2).has_value());
}

TEST_CASE("superlattice witnesses contain M and are integral") {
    GramMatrix i4 = GramMatrix::identity(4);
    for (long a : {4L, 8L, 12L, 16L}) {
        GramMatrix m = GramMatrix::diagonal(std::vector<long>{a, 4});
        auto sl = search_primitive_superlattice(i4, m, 1, 16);
        if (!sl) continue;
        CHECK(sl->gram.congruent(sl->inclusion) == m);
        CHECK(abs(det(sl->inclusion)) == sl->index);
    }
}
