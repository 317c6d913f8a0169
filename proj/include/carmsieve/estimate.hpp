#pragma once

#include <cstdint>
#include <vector>

#include "carmsieve/forms.hpp"

namespace carmsieve {

inline constexpr double kEulerGamma = 0.5772156649015328606;

struct SingularConstant {
  double value = 0;
  uint64_t cutoff = 0;
  double tail_bound = 0;  // bound on |log of the truncated tail|
};

struct EstimateRow {
  uint64_t m_limit = 0;
  double estimate = 0;
  int64_t rounded = 0;
};

// Number of distinct roots of prod(s*alpha_i*x + beta_i) mod p, i.e. the
// count of excluded residue classes. p must be prime.
unsigned root_count_omega(const UniversalForm& form, uint64_t p);

// Hardy-Littlewood singular series for the form, truncated at the cutoff:
//   C = prod_{p <= cutoff} (1 - omega(p)/p) / (1 - 1/p)^k.
// Factors for p > max(s*alpha_i) are (1 - k/p)/(1 - 1/p)^k, so the log of
// the dropped tail is bounded by k(k-1) / (2 * cutoff * ln(cutoff)).
SingularConstant singular_constant(const UniversalForm& form,
                                   uint64_t cutoff = 10'000'000);

// Dubner's chained constants for the quadruple form with alphas
// (20, 80, 100, 200): conditional densities for 20m+1 prime, then 80m+1 and
// 100m+1 given the previous ones, with p_q = 2.5 the leading density. Their
// product equals the generic singular constant (per-prime identity
// p^3 (p-4) / (p-1)^4).
struct ChainConstantsU44 {
  double p_q = 0;
  double c_r = 0;
  double c_s = 0;
  double c_t = 0;

  double combined() const { return p_q * c_r * c_s * c_t; }
};

ChainConstantsU44 dubner_chain_constants_u44(uint64_t cutoff = 10'000'000);

// E(M) = C * sum_{m=1}^{M} prod_i 1/log(s*alpha_i*m + beta_i), accumulated
// with compensated summation.
EstimateRow estimate_by_sum(const UniversalForm& form, const SingularConstant& c,
                            uint64_t m_limit);

// One pass capturing the running sum at each limit (ascending).
std::vector<EstimateRow> estimate_sum_rows(const UniversalForm& form,
                                           const SingularConstant& c,
                                           const std::vector<uint64_t>& limits);

// Closed-form approximation of the sum: with a_M defined by
//   (prod_i log(s*alpha_i*M + beta_i))^(1/k) = log(a_M * M),
// E(M) ~ C / ((k-1)! * a_M) * [ li(a_M*M) - li(a_M)
//        - sum_{j=1}^{k-1} (j-1)! * a_M*M / log^j(a_M*M) ].
// Derivation in docs/estimation.md. Domain error when a_M <= e.
EstimateRow estimate_by_integral(const UniversalForm& form, const SingularConstant& c,
                                 uint64_t m_limit);

// Integral of dt/log(t) from 2 to x, via the everywhere-positive series
// li(x) = gamma + ln ln x + sum_{n>=1} (ln x)^n / (n * n!). Requires x > 1.
double log_integral(double x);

struct MertensProduct {
  double product = 0;    // prod_{p <= sqrt(n)} (1 - 1/p)
  double asymptote = 0;  // 2 e^-gamma / ln n  (Mertens' third theorem)
  double ratio = 0;
};

MertensProduct mertens_product(uint64_t n);

}  // namespace carmsieve
