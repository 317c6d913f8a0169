#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "carmsieve/bigint.hpp"

namespace carmsieve {

enum class Provenance { Theorem, Ukl, Wk, Custom };

std::string_view provenance_name(Provenance p);
Provenance provenance_from_name(std::string_view name);

struct ValidationReport {
  bool pass = false;
  std::vector<std::string> violations;
};

// Ordered tuple a_1 < ... < a_r (r >= 3) with a_1 + ... + a_{r-1} = a_r,
// a_j | 2*a_r for every j, and gcd(a_1, ..., a_r) = 1.
struct CoefficientTuple {
  std::vector<uint64_t> values;

  size_t r() const { return values.size(); }
  uint64_t largest() const { return values.back(); }
};

ValidationReport validate_tuple(const std::vector<uint64_t>& values);

// Throws std::invalid_argument naming every violated condition. With
// normalize set, the gcd is divided out before validation.
CoefficientTuple make_tuple(std::vector<uint64_t> values, bool normalize = false);

struct LinearFactor {
  uint64_t alpha = 1;
  int64_t beta = 1;

  friend bool operator==(const LinearFactor&, const LinearFactor&) = default;
};

// Product of k linear factors (alpha_i * m + beta_i) evaluated at m = s * M.
// A form is "universal" when every M making all factors prime makes the
// product a Carmichael number; see verify_universal.
struct UniversalForm {
  std::vector<LinearFactor> factors;  // ascending alpha, unsubstituted
  uint64_t substitution = 1;          // s in m = s * M
  Provenance provenance = Provenance::Custom;

  size_t k() const { return factors.size(); }
  bool unit_intercepts() const;
  std::vector<uint64_t> substituted_alphas() const;  // s * alpha_i

  // "<provenance> <k> <s> <alpha_1>,...,<alpha_k>"; requires unit intercepts.
  std::string serialize() const;
  static UniversalForm parse(std::string_view line);

  friend bool operator==(const UniversalForm&, const UniversalForm&) = default;
};

// Factors 2*a_r*a_nu*m + 1 for each tuple element, extended by
// 2^(i+1)*a_r^2*m + 1 for i = 1..k-r; substitution s = 2^(k-r-1) when k > r.
UniversalForm construct_theorem_form(const CoefficientTuple& a, unsigned k);

// Tuple family a_1 = 1, a_2 = 2^(l-2), a_j = 2^(j-3)*(2^(l-2)+1) for
// 3 <= j <= l, passed through construct_theorem_form. l = 3 gives the
// classical Chernick factors (6m+1)(12m+1)(18m+1)(36m+1)...
UniversalForm family_ukl(unsigned k, unsigned l);

// Factors (6m+1), (4*3^i*m+1) for i = 1..k-2, (2*3^(k-1)*m+1) with s = 3^(k-3).
UniversalForm family_wk(unsigned k);

UniversalForm custom_form(std::vector<uint64_t> alphas, uint64_t substitution = 1);

struct PolynomialExpansion {
  std::vector<BigInt> coefficients;  // index = degree

  size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
};

std::vector<BigInt> expand_linear_product(const std::vector<LinearFactor>& factors);
PolynomialExpansion expand_coefficients(const UniversalForm& form, bool substituted);

struct FactorWitness {
  uint64_t modulus = 0;  // s * alpha_i
  bool ok = false;
  bool coefficient_divisibility = false;  // settled by the all-coefficients fast path
  bool enumerated = false;
  bool inconclusive = false;  // modulus above the enumeration bound
  uint64_t counterexample = 0;  // smallest failing M, valid when !ok
};

struct VerificationReport {
  bool verified = false;
  bool inconclusive = false;
  std::vector<FactorWitness> factors;
  uint64_t smallest_counterexample = 0;  // 0 when none
};

// Residue enumeration beyond the coefficient fast path is attempted only up
// to this modulus; larger moduli are reported inconclusive rather than spun
// on for hours.
inline constexpr uint64_t kVerifyEnumerationBound = 10'000'000;

// Decides whether s*alpha_i divides (U(M) - 1)/M for every factor and all M,
// i.e. whether every all-prime evaluation satisfies Korselt's criterion.
VerificationReport verify_universal(const UniversalForm& form);

struct Evaluation {
  std::vector<BigInt> factor_values;
  BigInt product;
};

Evaluation evaluate(const UniversalForm& form, uint64_t m);

}  // namespace carmsieve
