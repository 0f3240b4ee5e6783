#pragma once

// Exact rational verification of the combinatorial identities behind the
// energy formulas.

#include "kahler/check_report.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <map>

namespace kahler {

using Rational = boost::multiprecision::cpp_rational;

Rational exact_binomial(int n, int k);

/// (n-i+1) C(k+1,i) - (k+1) C(k,i) - (n-k) C(k+1,i).
Rational zero_identity_value(int n, int k, int i);
/// sum_{i=j+1}^{k} C(k+1,i+1) C(i-1,j) (-1)^{i+j}; the empty sum is 0.
Rational binomial_identity_sum(int k, int j);

/// Polynomial in (lambda_r, lambda_s, t) with rational coefficients.
class Polynomial {
 public:
  using Exponents = std::array<int, 3>;

  static Polynomial constant(const Rational& c);
  static Polynomial variable(int index);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  bool operator==(const Polynomial& o) const;
  /// Coefficient of t^k as a polynomial in the eigenvalues.
  Polynomial coefficient_of_t(int k) const;

  const std::map<Exponents, Rational>& terms() const { return terms_; }

 private:
  void prune();
  std::map<Exponents, Rational> terms_;
};

CheckReport verify_zero_identity(int n_max);
CheckReport verify_binomial_identity(int k_max);
CheckReport verify_sigma_expansion(int n);

}  // namespace kahler
