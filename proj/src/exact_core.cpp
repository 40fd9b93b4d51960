#include "quadrep/exact_core.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace quadrep {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ArgumentError("ragged matrix literal");
        for (long v : r) data_.emplace_back(v);
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVector>& cols, std::size_t height) {
    IntMatrix m(height, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != height) throw ArgumentError("column height mismatch");
        for (std::size_t i = 0; i < height; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

IntVector IntMatrix::column(std::size_t j) const {
    IntVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void IntMatrix::set_column(std::size_t j, const IntVector& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMatrix IntMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    IntMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw ArgumentError("matrix shape mismatch in product");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Integer& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

IntVector operator*(const IntMatrix& a, const IntVector& v) {
    if (a.cols_ != v.size()) throw ArgumentError("matrix/vector shape mismatch");
    IntVector r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) r[i] += a(i, k) * v[k];
    return r;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
        os << ']';
    }
    return os << ']';
}

GramMatrix::GramMatrix(IntMatrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) throw ArgumentError("Gram matrix must be square");
    for (std::size_t i = 0; i < m_.rows(); ++i)
        for (std::size_t j = i + 1; j < m_.cols(); ++j)
            if (m_(i, j) != m_(j, i)) throw ArgumentError("Gram matrix must be symmetric");
}

GramMatrix::GramMatrix(std::initializer_list<std::initializer_list<long>> rows) : GramMatrix(IntMatrix(rows)) {}

GramMatrix GramMatrix::identity(std::size_t n) { return GramMatrix(IntMatrix::identity(n)); }

GramMatrix GramMatrix::diagonal(const std::vector<long>& d) {
    IntMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return GramMatrix(std::move(m));
}

GramMatrix GramMatrix::diagonal(const IntVector& d) {
    IntMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return GramMatrix(std::move(m));
}

Integer GramMatrix::q(const IntVector& x) const { return b(x, x); }

Integer GramMatrix::b(const IntVector& x, const IntVector& y) const {
    const std::size_t n = rank();
    Integer acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == 0) continue;
        Integer row = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (y[j] != 0) row += m_(i, j) * y[j];
        acc += x[i] * row;
    }
    return acc;
}

GramMatrix GramMatrix::congruent(const IntMatrix& u) const { return GramMatrix(u.transpose() * m_ * u); }

Integer gcd_of(const IntVector& v) {
    Integer g = 0;
    for (const auto& x : v) g = gcd(g, x);
    return g;
}

namespace {

// Fraction-free elimination. Returns the sequence of pivots without row exchanges
// (the k-th one is the k-th leading principal minor), or stops at the first zero.
std::vector<Integer> bareiss_pivots(IntMatrix a) {
    const std::size_t n = a.rows();
    std::vector<Integer> pivots;
    Integer prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (a(k, k) == 0) {
            pivots.push_back(0);
            return pivots;
        }
        pivots.push_back(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            }
        prev = a(k, k);
    }
    return pivots;
}

}  // namespace

Integer det(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw ArgumentError("determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t r = k + 1;
            while (r < n && a(r, k) == 0) ++r;
            if (r == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(r, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

bool is_positive_definite(const GramMatrix& s) {
    for (const auto& p : bareiss_pivots(s.matrix()))
        if (p <= 0) return false;
    return true;
}

std::size_t rank(const IntMatrix& m) {
    IntMatrix a = m;
    const std::size_t rows = a.rows(), cols = a.cols();
    std::size_t r = 0;
    Integer prev = 1;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a(p, c) == 0) ++p;
        if (p == rows) continue;
        for (std::size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(p, j));
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) a(i, j) = (a(i, j) * a(r, c) - a(i, c) * a(r, j)) / prev;
            a(i, c) = 0;
        }
        prev = a(r, c);
        ++r;
    }
    return r;
}

namespace {

void swap_rows(IntMatrix& a, std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(i, c), a(j, c));
}

void swap_cols(IntMatrix& a, std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
}

// row_i += k * row_j
void add_row(IntMatrix& a, std::size_t i, std::size_t j, const Integer& k) {
    for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) += k * a(j, c);
}

void add_col(IntMatrix& a, std::size_t i, std::size_t j, const Integer& k) {
    for (std::size_t r = 0; r < a.rows(); ++r) a(r, i) += k * a(r, j);
}

void negate_row(IntMatrix& a, std::size_t i) {
    for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) = -a(i, c);
}

// Replace rows (i, j) by the unimodular combination bringing gcd(a(i,c), a(j,c)) into row i.
void gcd_rows(IntMatrix& a, IntMatrix& u, std::size_t i, std::size_t j, std::size_t c) {
    Integer g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a(i, c).get_mpz_t(), a(j, c).get_mpz_t());
    Integer x = a(i, c) / g, y = a(j, c) / g;
    auto combine = [&](IntMatrix& m) {
        for (std::size_t k = 0; k < m.cols(); ++k) {
            Integer ri = m(i, k), rj = m(j, k);
            m(i, k) = s * ri + t * rj;
            m(j, k) = -y * ri + x * rj;
        }
    };
    combine(a);
    combine(u);
}

void gcd_cols(IntMatrix& a, IntMatrix& v, std::size_t i, std::size_t j, std::size_t r) {
    Integer g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a(r, i).get_mpz_t(), a(r, j).get_mpz_t());
    Integer x = a(r, i) / g, y = a(r, j) / g;
    auto combine = [&](IntMatrix& m) {
        for (std::size_t k = 0; k < m.rows(); ++k) {
            Integer ci = m(k, i), cj = m(k, j);
            m(k, i) = s * ci + t * cj;
            m(k, j) = -y * ci + x * cj;
        }
    };
    combine(a);
    combine(v);
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& x) {
    const std::size_t rows = x.rows(), cols = x.cols();
    IntMatrix a = x;
    IntMatrix u = IntMatrix::identity(rows);
    IntMatrix v = IntMatrix::identity(cols);
    const std::size_t steps = std::min(rows, cols);

    for (std::size_t t = 0; t < steps; ++t) {
        // bring a nonzero entry of minimal absolute value to (t, t)
        std::size_t pr = rows, pc = cols;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (a(i, j) != 0 && (pr == rows || abs(a(i, j)) < abs(a(pr, pc)))) {
                    pr = i;
                    pc = j;
                }
        if (pr == rows) break;
        if (pr != t) {
            swap_rows(a, t, pr);
            swap_rows(u, t, pr);
        }
        if (pc != t) {
            swap_cols(a, t, pc);
            swap_cols(v, t, pc);
        }

        for (;;) {
            bool dirty = false;
            for (std::size_t i = t + 1; i < rows; ++i)
                if (a(i, t) != 0) {
                    if (a(i, t) % a(t, t) == 0) {
                        Integer k = -(a(i, t) / a(t, t));
                        add_row(a, i, t, k);
                        add_row(u, i, t, k);
                    } else {
                        gcd_rows(a, u, t, i, t);
                        dirty = true;
                    }
                }
            for (std::size_t j = t + 1; j < cols; ++j)
                if (a(t, j) != 0) {
                    if (a(t, j) % a(t, t) == 0) {
                        Integer k = -(a(t, j) / a(t, t));
                        add_col(a, j, t, k);
                        add_col(v, j, t, k);
                    } else {
                        gcd_cols(a, v, t, j, t);
                        dirty = true;
                    }
                }
            if (dirty) continue;
            // divisibility of the remaining block by the pivot
            std::size_t bad = rows;
            for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (a(i, j) % a(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad == rows) break;
            add_row(a, t, bad, Integer(1));
            add_row(u, t, bad, Integer(1));
        }
        if (a(t, t) < 0) {
            negate_row(a, t);
            negate_row(u, t);
        }
    }

    SmithForm out;
    out.divisors.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) out.divisors[t] = a(t, t);
    out.u = std::move(u);
    out.v = std::move(v);
    return out;
}

IntMatrix lattice_basis(const IntMatrix& generators) {
    // Row Hermite form of the transposed generator matrix.
    IntMatrix a = generators.transpose();
    IntMatrix dummy(a.rows(), 0);
    const std::size_t rows = a.rows(), cols = a.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        for (std::size_t i = r + 1; i < rows; ++i)
            if (a(i, c) != 0) {
                if (a(r, c) == 0) {
                    swap_rows(a, r, i);
                } else {
                    gcd_rows(a, dummy, r, i, c);
                }
            }
        if (a(r, c) == 0) continue;
        if (a(r, c) < 0) negate_row(a, r);
        for (std::size_t i = 0; i < r; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), a(i, c).get_mpz_t(), a(r, c).get_mpz_t());
            if (q != 0) add_row(a, i, r, Integer(-q));
        }
        ++r;
    }
    return a.block(0, 0, r, cols).transpose();
}

IntMatrix unimodular_inverse(const IntMatrix& u) {
    const std::size_t n = u.rows();
    if (u.cols() != n) throw ArgumentError("inverse of non-square matrix");
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = u(i, j);
        a[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw DegenerateError("matrix is singular");
        std::swap(a[p], a[c]);
        Rational inv = 1 / a[c][c];
        for (auto& e : a[c]) e *= inv;
        for (std::size_t i = 0; i < n; ++i)
            if (i != c && a[i][c] != 0) {
                Rational f = a[i][c];
                for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
            }
    }
    IntMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Rational& e = a[i][n + j];
            if (e.get_den() != 1) throw ArgumentError("matrix is not unimodular");
            out(i, j) = e.get_num();
        }
    return out;
}

IntMatrix saturate(const IntMatrix& b) {
    const std::size_t k = b.cols();
    if (rank(b) != k) throw DegenerateError("saturate: basis is rank deficient");
    SmithForm sf = smith_normal_form(b);
    IntMatrix uinv = unimodular_inverse(sf.u);
    return lattice_basis(uinv.block(0, 0, b.rows(), k));
}

IntMatrix orthogonal_complement(const GramMatrix& s, const IntMatrix& b) {
    const std::size_t n = s.rank();
    if (b.rows() != n) throw ArgumentError("orthogonal_complement: basis height mismatch");
    IntMatrix a = b.transpose() * s.matrix();
    if (det(a * b) == 0) throw DegenerateError("orthogonal_complement: subspace is degenerate");
    SmithForm sf = smith_normal_form(a);
    const std::size_t r = b.cols();
    if (n == r) return IntMatrix(n, 0);
    return lattice_basis(sf.v.block(0, r, n, n - r));
}

RationalDiagonalization diagonalize_with_transform(const GramMatrix& s) {
    const std::size_t n = s.rank();
    using RMat = std::vector<std::vector<Rational>>;
    RMat a(n, std::vector<Rational>(n)), p(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        p[i][i] = 1;
        for (std::size_t j = 0; j < n; ++j) a[i][j] = s(i, j);
    }
    // basis change b_i <- b_i + f * b_j, applied as a congruence
    auto add = [&](std::size_t i, std::size_t j, const Rational& f) {
        for (std::size_t r = 0; r < n; ++r) p[r][i] += f * p[r][j];
        for (std::size_t r = 0; r < n; ++r) a[r][i] += f * a[r][j];
        for (std::size_t c = 0; c < n; ++c) a[i][c] += f * a[j][c];
    };
    auto scale = [&](std::size_t i, const Rational& f) {
        for (std::size_t r = 0; r < n; ++r) p[r][i] *= f;
        for (std::size_t r = 0; r < n; ++r) a[r][i] *= f;
        for (std::size_t c = 0; c < n; ++c) a[i][c] *= f;
    };
    auto swap_basis = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < n; ++r) std::swap(p[r][i], p[r][j]);
        std::swap(a[i], a[j]);
        for (std::size_t r = 0; r < n; ++r) std::swap(a[r][i], a[r][j]);
    };

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = n;
        for (std::size_t i = k; i < n; ++i)
            if (a[i][i] != 0) {
                piv = i;
                break;
            }
        if (piv == n) {
            std::size_t pi = n, pj = n;
            for (std::size_t i = k; i < n && pi == n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (a[i][j] != 0) {
                        pi = i;
                        pj = j;
                        break;
                    }
            if (pi == n) throw DegenerateError("diagonalize_over_q: form is singular");
            // x_i = u + v, x_j = u - v
            add(pi, pj, Rational(1));
            scale(pj, Rational(-2));
            add(pj, pi, Rational(1));
            piv = pi;
        }
        if (piv != k) swap_basis(piv, k);
        for (std::size_t r = k + 1; r < n; ++r)
            if (a[k][r] != 0) add(r, k, Rational(-a[k][r] / a[k][k]));
    }
    RationalDiagonalization out;
    out.diagonal.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.diagonal[i] = a[i][i];
    out.transform = std::move(p);
    return out;
}

std::vector<Rational> diagonalize_over_q(const GramMatrix& s) { return diagonalize_with_transform(s).diagonal; }

namespace {

Integer parse_integer(const std::string& tok) {
    Integer v;
    if (tok.empty() || v.set_str(tok, 10) != 0) throw ArgumentError("not an integer: '" + tok + "'");
    return v;
}

}  // namespace

GramMatrix parse_gram(const std::string& text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ArgumentError("empty Gram matrix input");
    if (text[first] == '[') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ArgumentError(std::string("malformed JSON Gram matrix: ") + e.what());
        }
        if (!j.is_array() || j.empty()) throw ArgumentError("JSON Gram matrix must be a non-empty array of arrays");
        const std::size_t n = j.size();
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!j[i].is_array() || j[i].size() != n) throw ArgumentError("JSON Gram matrix must be square");
            for (std::size_t c = 0; c < n; ++c) {
                const auto& e = j[i][c];
                if (e.is_number_integer())
                    m(i, c) = parse_integer(e.dump());
                else if (e.is_string())
                    m(i, c) = parse_integer(e.get<std::string>());
                else
                    throw ArgumentError("JSON Gram entries must be integers");
            }
        }
        return GramMatrix(std::move(m));
    }
    std::istringstream in(text);
    std::string tok;
    if (!(in >> tok)) throw ArgumentError("missing dimension");
    Integer nn = parse_integer(tok);
    if (nn <= 0 || nn > 1000) throw ArgumentError("dimension out of range");
    const std::size_t n = nn.get_ui();
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < n; ++c) {
            if (!(in >> tok)) throw ArgumentError("too few matrix entries");
            m(i, c) = parse_integer(tok);
        }
    if (in >> tok) throw ArgumentError("trailing data after matrix entries");
    return GramMatrix(std::move(m));
}

GramMatrix read_gram_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_gram(ss.str());
}

std::string format_gram(const GramMatrix& s) {
    std::ostringstream os;
    os << s.rank() << '\n';
    for (std::size_t i = 0; i < s.rank(); ++i) {
        for (std::size_t j = 0; j < s.rank(); ++j) os << (j ? " " : "") << s(i, j);
        os << '\n';
    }
    return os.str();
}

}  // namespace quadrep
