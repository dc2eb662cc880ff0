#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace ssg {

using Rational = mpq_class;

/// Always "p/q", including integers ("0/1", "1/1").
std::string to_fraction_string(const Rational& q);
Rational parse_fraction(std::string_view s);

/// Square system A x = b with small integer coefficients and rational rhs.
struct SparseSystem {
  struct Entry {
    int col;
    std::int64_t coef;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<Rational> rhs;

  int size() const { return static_cast<int>(rows.size()); }
};

/// Exact solution by elimination modulo several 62-bit primes, Chinese
/// remaindering of det(A) and adj(A) b, and an exact residual check over the
/// rationals. Throws std::runtime_error if A is singular or the check fails.
std::vector<Rational> solve_exact_modular(const SparseSystem& sys);

/// Exact solution by Gaussian elimination over the rationals. Slower; used as
/// a cross-check of the modular route.
std::vector<Rational> solve_exact_elimination(const SparseSystem& sys);

/// binary64 solution: sparse LU with partial pivoting followed by one step of
/// iterative refinement.
std::vector<double> solve_float(const SparseSystem& sys);

/// max_i |(A x - b)_i| in binary64.
double max_residual(const SparseSystem& sys, const std::vector<double>& x);

}  // namespace ssg
