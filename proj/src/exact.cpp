#include "kahler/exact.hpp"

#include "kahler/errors.hpp"

#include <string>

namespace kahler {

Rational exact_binomial(int n, int k)
{
  if (k < 0 || n < 0 || k > n) return 0;
  boost::multiprecision::cpp_int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return Rational(r);
}

Rational zero_identity_value(int n, int k, int i)
{
  return Rational(n - i + 1) * exact_binomial(k + 1, i) - Rational(k + 1) * exact_binomial(k, i) -
         Rational(n - k) * exact_binomial(k + 1, i);
}

Rational binomial_identity_sum(int k, int j)
{
  Rational s = 0;
  for (int i = j + 1; i <= k; ++i) {
    const Rational term = exact_binomial(k + 1, i + 1) * exact_binomial(i - 1, j);
    s += (i + j) % 2 == 0 ? term : Rational(-term);
  }
  return s;
}

// ------------------------------------------------------------------ polynomials

Polynomial Polynomial::constant(const Rational& c)
{
  Polynomial p;
  p.terms_[{0, 0, 0}] = c;
  p.prune();
  return p;
}

Polynomial Polynomial::variable(int index)
{
  Polynomial p;
  Exponents e{0, 0, 0};
  e.at(static_cast<std::size_t>(index)) = 1;
  p.terms_[e] = 1;
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const
{
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.terms_[e] += c;
  r.prune();
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const
{
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.terms_[e] -= c;
  r.prune();
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const
{
  Polynomial r;
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) r.terms_[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += ca * cb;
  r.prune();
  return r;
}

bool Polynomial::operator==(const Polynomial& o) const
{
  return terms_ == o.terms_;
}

Polynomial Polynomial::coefficient_of_t(int k) const
{
  Polynomial r;
  for (const auto& [e, c] : terms_)
    if (e[2] == k) r.terms_[{e[0], e[1], 0}] += c;
  r.prune();
  return r;
}

void Polynomial::prune()
{
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0; });
}

// ------------------------------------------------------------------ checks

CheckReport verify_zero_identity(int n_max)
{
  if (n_max < 1) throw ParameterError("n_max must be at least 1");
  CheckReport rep;
  long checked = 0, failures = 0;
  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k <= n; ++k)
      for (int i = 1; i <= k + 1; ++i) {
        ++checked;
        if (zero_identity_value(n, k, i) != 0) ++failures;
      }
  auto& c = rep.add("binomial zero identity", "(n-i+1)C(k+1,i) - (k+1)C(k,i) - (n-k)C(k+1,i) = 0", double(failures), 0,
                    0, Relation::equal);
  c.note = std::to_string(checked) + " tuples with n <= " + std::to_string(n_max) + ", exact";
  return rep;
}

CheckReport verify_binomial_identity(int k_max)
{
  if (k_max < 1) throw ParameterError("k_max must be at least 1");
  CheckReport rep;
  long checked = 0, failures = 0;
  for (int k = 1; k <= k_max; ++k)
    for (int j = 0; j < k; ++j) {
      ++checked;
      if (binomial_identity_sum(k, j) != Rational(j - k)) ++failures;
    }
  auto& c = rep.add("alternating binomial sum", "sum C(k+1,i+1) C(i-1,j) (-1)^(i+j) = j - k", double(failures), 0, 0,
                    Relation::equal);
  c.note = std::to_string(checked) + " pairs with k <= " + std::to_string(k_max) + ", exact";
  return rep;
}

CheckReport verify_sigma_expansion(int n)
{
  if (n < 1 || n > 4) throw ParameterError("sigma expansion is checked for 1 <= n <= 4");
  const Polynomial lr = Polynomial::variable(0), ls = Polynomial::variable(1), t = Polynomial::variable(2);
  const Polynomial one = Polynomial::constant(1);
  Polynomial product = one + t * lr;
  for (int i = 1; i < n; ++i) product = product * (one + t * ls);

  auto power = [&](const Polynomial& p, int e) {
    Polynomial r = one;
    for (int i = 0; i < e; ++i) r = r * p;
    return r;
  };
  long failures = 0;
  for (int k = 0; k <= n; ++k) {
    Polynomial closed = Polynomial::constant(exact_binomial(n - 1, k)) * power(ls, k);
    if (k >= 1) closed = closed + Polynomial::constant(exact_binomial(n - 1, k - 1)) * power(ls, k - 1) * lr;
    if (!(closed == product.coefficient_of_t(k))) ++failures;
  }
  // sigma_1 = R and sigma_2 = (R^2 - |Ric|^2)/2
  const Polynomial scalar = lr + Polynomial::constant(n - 1) * ls;
  const Polynomial norm = lr * lr + Polynomial::constant(n - 1) * ls * ls;
  if (!(product.coefficient_of_t(1) == scalar)) ++failures;
  if (!(product.coefficient_of_t(2) == Polynomial::constant(Rational(1, 2)) * (scalar * scalar - norm))) ++failures;

  CheckReport rep;
  auto& c = rep.add("sigma_k two-eigenvalue form n=" + std::to_string(n), "(omega + t Ric)^n = sum sigma_k t^k omega^n",
                    double(failures), 0, 0, Relation::equal);
  c.note = "exact polynomial arithmetic";
  return rep;
}

}  // namespace kahler
