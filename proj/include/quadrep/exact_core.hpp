#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadrep {

using Integer = mpz_class;
using Rational = mpq_class;
using IntVector = std::vector<Integer>;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Singular Gram, rank-deficient basis, isotropic reflection vector, ...
class DegenerateError : public Error {
  public:
    using Error::Error;
};

/// Precondition violations on otherwise well-formed input.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static IntMatrix identity(std::size_t n);
    static IntMatrix from_columns(const std::vector<IntVector>& cols, std::size_t height);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    IntVector column(std::size_t j) const;
    void set_column(std::size_t j, const IntVector& v);
    IntMatrix transpose() const;
    IntMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    friend IntVector operator*(const IntMatrix& a, const IntVector& v);
    friend bool operator==(const IntMatrix& a, const IntMatrix& b);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

std::ostream& operator<<(std::ostream& os, const IntMatrix& m);

/// Symmetric integral matrix S; the quadratic form is Q(x) = tx S x.
class GramMatrix {
  public:
    GramMatrix() = default;
    explicit GramMatrix(IntMatrix entries);
    GramMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static GramMatrix identity(std::size_t n);
    static GramMatrix diagonal(const std::vector<long>& d);
    static GramMatrix diagonal(const IntVector& d);

    std::size_t rank() const { return m_.rows(); }
    const IntMatrix& matrix() const { return m_; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    Integer q(const IntVector& x) const;
    Integer b(const IntVector& x, const IntVector& y) const;

    /// tU S U
    GramMatrix congruent(const IntMatrix& u) const;

    friend bool operator==(const GramMatrix& a, const GramMatrix& b) { return a.m_ == b.m_; }

  private:
    IntMatrix m_;
};

struct SmithForm {
    IntVector divisors;  // d_1 | d_2 | ... , length min(rows, cols)
    IntMatrix u;         // unimodular, rows x rows
    IntMatrix v;         // unimodular, cols x cols; u * X * v is diagonal
};

Integer det(const IntMatrix& a);
inline Integer det(const GramMatrix& s) { return det(s.matrix()); }

bool is_positive_definite(const GramMatrix& s);

SmithForm smith_normal_form(const IntMatrix& x);

/// Rank over Q.
std::size_t rank(const IntMatrix& x);

/// Basis (as columns) of QB ∩ Z^n.
IntMatrix saturate(const IntMatrix& b);

/// Saturated basis (as columns) of {v in Z^n : tB S v = 0}.
IntMatrix orthogonal_complement(const GramMatrix& s, const IntMatrix& b);

/// Congruence diagonalization over Q: returns d and a rational P with tP S P = diag(d).
struct RationalDiagonalization {
    std::vector<Rational> diagonal;
    std::vector<std::vector<Rational>> transform;  // row-major n x n
};
RationalDiagonalization diagonalize_with_transform(const GramMatrix& s);
std::vector<Rational> diagonalize_over_q(const GramMatrix& s);

/// Columns spanning the same lattice as the given generators (columns), in Hermite shape.
IntMatrix lattice_basis(const IntMatrix& generators);

/// Inverse of a unimodular matrix; throws if |det| != 1.
IntMatrix unimodular_inverse(const IntMatrix& u);

Integer gcd_of(const IntVector& v);

/// Plain text ("n" then n rows) or JSON array of arrays.
GramMatrix parse_gram(const std::string& text);
GramMatrix read_gram_file(const std::string& path);
std::string format_gram(const GramMatrix& s);

}  // namespace quadrep
