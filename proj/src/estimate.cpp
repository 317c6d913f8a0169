#include "carmsieve/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carmsieve/primality.hpp"

namespace carmsieve {

namespace {

struct KahanSum {
  double sum = 0;
  double carry = 0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Extended Euclid; p need not be prime but a must be invertible.
uint64_t inverse_mod(uint64_t a, uint64_t p) {
  int64_t t = 0, new_t = 1;
  int64_t r = static_cast<int64_t>(p), new_r = static_cast<int64_t>(a % p);
  while (new_r != 0) {
    const int64_t q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  if (r != 1) throw std::invalid_argument("inverse_mod: not invertible");
  if (t < 0) t += static_cast<int64_t>(p);
  return static_cast<uint64_t>(t);
}

uint64_t isqrt_u64(uint64_t n) {
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

double factorial(unsigned n) {
  double f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

unsigned root_count_omega(const UniversalForm& form, uint64_t p) {
  if (!is_prime_64(p)) throw std::invalid_argument("root_count_omega: p must be prime");
  if (p > static_cast<uint64_t>(INT64_MAX))
    throw std::invalid_argument("root_count_omega: p too large");
  std::vector<uint64_t> roots;
  for (const LinearFactor& f : form.factors) {
    const uint64_t slope =
        static_cast<uint64_t>(static_cast<unsigned __int128>(form.substitution) *
                              f.alpha % p);
    const uint64_t intercept = static_cast<uint64_t>(
        ((f.beta % static_cast<int64_t>(p)) + static_cast<int64_t>(p)) %
        static_cast<int64_t>(p));
    if (slope == 0) {
      // p divides s*alpha_i: the factor is congruent to beta_i everywhere,
      // so it contributes no root unless it vanishes identically mod p.
      if (intercept == 0) return static_cast<unsigned>(std::min<uint64_t>(p, UINT32_MAX));
      continue;
    }
    // root of slope*x + intercept: x = -intercept * slope^-1
    const uint64_t root = static_cast<uint64_t>(
        static_cast<unsigned __int128>((p - intercept) % p) * inverse_mod(slope, p) % p);
    roots.push_back(root);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return static_cast<unsigned>(roots.size());
}

SingularConstant singular_constant(const UniversalForm& form, uint64_t cutoff) {
  if (cutoff < 100) throw std::invalid_argument("singular_constant: cutoff must be >= 100");
  const unsigned k = static_cast<unsigned>(form.k());
  const PrimeTable table = sieve_primes(cutoff);

  KahanSum log_c;
  for (const uint64_t p : table.primes) {
    const unsigned omega = root_count_omega(form, p);
    const double pd = static_cast<double>(p);
    if (omega >= p) {
      // every residue excluded: the product vanishes
      return {0.0, cutoff, 0.0};
    }
    log_c.add(std::log1p(-static_cast<double>(omega) / pd) -
              static_cast<double>(k) * std::log1p(-1.0 / pd));
  }

  SingularConstant c;
  c.cutoff = cutoff;
  c.value = std::exp(log_c.sum);
  // For p > cutoff the log factor is -(k(k-1)/2)/p^2 + O(1/p^3); summing over
  // primes beyond the cutoff is below k(k-1) / (2 * cutoff * ln cutoff).
  c.tail_bound = static_cast<double>(k) * (k - 1) /
                 (2.0 * static_cast<double>(cutoff) * std::log(static_cast<double>(cutoff)));
  return c;
}

ChainConstantsU44 dubner_chain_constants_u44(uint64_t cutoff) {
  if (cutoff < 100)
    throw std::invalid_argument("dubner_chain_constants_u44: cutoff must be >= 100");
  const PrimeTable table = sieve_primes(cutoff);

  // Densities conditioned along the chain 20m+1, then 80m+1 and 100m+1, then
  // 200m+1, with explicit factors at p = 2, 3, 5 and Euler products beyond.
  KahanSum log_r, log_s, log_t;
  for (const uint64_t p : table.primes) {
    if (p < 7) continue;
    const double pd = static_cast<double>(p);
    log_r.add(std::log(pd) + std::log(pd - 2) - 2 * std::log(pd - 1));
    log_s.add(std::log(pd) + std::log(pd - 3) - std::log(pd - 1) - std::log(pd - 2));
    log_t.add(std::log(pd) + std::log(pd - 4) - std::log(pd - 1) - std::log(pd - 3));
  }

  ChainConstantsU44 chain;
  chain.p_q = 2.5;
  chain.c_r = 2.0 * (3.0 / 2.0) * (5.0 / 4.0) * std::exp(log_r.sum);
  chain.c_s = 2.0 * (3.0 / 4.0) * (5.0 / 4.0) * std::exp(log_s.sum);
  chain.c_t = 2.0 * (3.0 / 2.0) * (5.0 / 4.0) * std::exp(log_t.sum);
  return chain;
}

EstimateRow estimate_by_sum(const UniversalForm& form, const SingularConstant& c,
                            uint64_t m_limit) {
  return estimate_sum_rows(form, c, {m_limit}).front();
}

std::vector<EstimateRow> estimate_sum_rows(const UniversalForm& form,
                                           const SingularConstant& c,
                                           const std::vector<uint64_t>& limits) {
  if (limits.empty()) throw std::invalid_argument("estimate_sum_rows: no limits");
  for (size_t i = 0; i < limits.size(); ++i) {
    if (limits[i] < 1)
      throw std::invalid_argument("estimate_sum_rows: limits must be >= 1");
    if (i > 0 && limits[i] <= limits[i - 1])
      throw std::invalid_argument("estimate_sum_rows: limits must be ascending");
  }

  std::vector<double> slopes;
  std::vector<double> intercepts;
  for (const LinearFactor& f : form.factors) {
    slopes.push_back(static_cast<double>(form.substitution) * static_cast<double>(f.alpha));
    intercepts.push_back(static_cast<double>(f.beta));
  }

  std::vector<EstimateRow> rows;
  KahanSum sum;
  size_t next = 0;
  for (uint64_t m = 1; m <= limits.back(); ++m) {
    const double md = static_cast<double>(m);
    double term = 1.0;
    for (size_t i = 0; i < slopes.size(); ++i)
      term /= std::log(slopes[i] * md + intercepts[i]);
    sum.add(term);
    while (next < limits.size() && m == limits[next]) {
      const double estimate = c.value * sum.sum;
      rows.push_back({limits[next], estimate, std::llround(estimate)});
      ++next;
    }
  }
  return rows;
}

double log_integral(double x) {
  if (!(x > 1.0)) throw std::domain_error("log_integral: x must be > 1");
  const auto li = [](double v) {
    const double u = std::log(v);
    double sum = kEulerGamma + std::log(u);
    double term = 1.0;
    for (int n = 1; n < 400; ++n) {
      term *= u / n;
      const double add = term / n;
      sum += add;
      if (n > u && add < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  };
  return li(x) - li(2.0);
}

EstimateRow estimate_by_integral(const UniversalForm& form, const SingularConstant& c,
                                 uint64_t m_limit) {
  if (m_limit < 1) throw std::invalid_argument("estimate_by_integral: limit must be >= 1");
  const unsigned k = static_cast<unsigned>(form.k());
  if (k < 1 || k > 170) throw std::invalid_argument("estimate_by_integral: bad k");

  // a_M solves (prod_i log(s*alpha_i*M + beta_i))^(1/k) = log(a_M * M).
  const double md = static_cast<double>(m_limit);
  KahanSum log_log;
  for (const LinearFactor& f : form.factors) {
    const double value =
        static_cast<double>(form.substitution) * static_cast<double>(f.alpha) * md +
        static_cast<double>(f.beta);
    log_log.add(std::log(std::log(value)));
  }
  const double log_am_m = std::exp(log_log.sum / k);
  const double a_m = std::exp(log_am_m) / md;
  if (a_m <= std::exp(1.0))
    throw std::domain_error("estimate_by_integral: a_M <= e, expansion invalid");

  const double x = a_m * md;  // upper end a_M * M
  double bracket = log_integral(x) - log_integral(a_m);
  double x_over_logj = x;
  for (unsigned j = 1; j <= k - 1; ++j) {
    x_over_logj /= log_am_m;
    bracket -= factorial(j - 1) * x_over_logj;
  }

  const double estimate = c.value / (factorial(k - 1) * a_m) * bracket;
  return {m_limit, estimate, std::llround(estimate)};
}

MertensProduct mertens_product(uint64_t n) {
  if (n < 9) throw std::invalid_argument("mertens_product: n must be >= 9");
  const uint64_t root = isqrt_u64(n);
  const PrimeTable table = sieve_primes(root);

  KahanSum log_product;
  for (const uint64_t p : table.primes)
    log_product.add(std::log1p(-1.0 / static_cast<double>(p)));

  MertensProduct result;
  result.product = std::exp(log_product.sum);
  result.asymptote = 2.0 * std::exp(-kEulerGamma) / std::log(static_cast<double>(n));
  result.ratio = result.product / result.asymptote;
  return result;
}

}  // namespace carmsieve
