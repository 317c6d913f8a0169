#include "carmsieve/korselt.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "carmsieve/primality.hpp"

namespace carmsieve {

KorseltResult korselt_check(const BigInt& n, std::vector<BigInt> factors) {
  if (n < 1) throw std::invalid_argument("korselt_check: n must be positive");
  if (factors.empty()) throw std::invalid_argument("korselt_check: no factors given");

  std::sort(factors.begin(), factors.end());

  BigInt product = 1;
  for (const BigInt& f : factors) product *= f;
  if (product != n) {
    std::ostringstream msg;
    msg << "korselt_check: factors multiply to " << product << ", not " << n;
    throw std::invalid_argument(msg.str());
  }

  KorseltResult result;
  result.certificate.n = n;
  result.certificate.factors = factors;

  if (n % 2 == 0) result.reasons.push_back("N is even");
  if (factors.size() < 3)
    result.reasons.push_back("fewer than 3 prime factors (" +
                             std::to_string(factors.size()) + ")");

  const BigInt n_minus_1 = n - 1;
  for (size_t i = 0; i < factors.size(); ++i) {
    const BigInt& p = factors[i];
    FactorCheckRecord record;
    record.factor = p;

    if (i > 0 && p == factors[i - 1]) {
      std::ostringstream msg;
      msg << "repeated factor " << p << " (N is not squarefree)";
      result.reasons.push_back(msg.str());
    }

    if (p < 2) {
      record.prime = false;
    } else if (p <= UINT64_MAX) {
      record.prime = is_prime_64(static_cast<uint64_t>(p));
    } else {
      record.prime = is_probable_prime_big(p, 64);
      record.probable = true;
    }
    if (!record.prime) {
      std::ostringstream msg;
      msg << "factor " << p << " is not prime";
      result.reasons.push_back(msg.str());
    }

    record.divides = (p > 1) && (n_minus_1 % (p - 1) == 0);
    if (!record.divides) {
      std::ostringstream msg;
      msg << "(p - 1) does not divide (N - 1) for p = " << p;
      result.reasons.push_back(msg.str());
    }

    result.certificate.checks.push_back(std::move(record));
  }

  result.accepted = result.reasons.empty();
  return result;
}

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t n) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t n) {
  uint64_t result = 1 % n;
  base %= n;
  while (exp) {
    if (exp & 1) result = mulmod_u64(result, base, n);
    base = mulmod_u64(base, base, n);
    exp >>= 1;
  }
  return result;
}

// Deliberately independent of is_prime_64: plain trial division.
bool composite_by_trial_division(uint64_t n) {
  if (n < 4) return false;
  if (n % 2 == 0) return true;
  for (uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return true;
  return false;
}

uint64_t gcd_u64(uint64_t a, uint64_t b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

}  // namespace

bool carmichael_oracle(uint64_t n, uint64_t bound) {
  if (n > bound)
    throw std::invalid_argument("carmichael_oracle: n = " + std::to_string(n) +
                                " exceeds the bound " + std::to_string(bound));
  if (n < 3) return false;
  if (!composite_by_trial_division(n)) return false;
  for (uint64_t a = 2; a < n; ++a) {
    if (gcd_u64(a, n) != 1) continue;
    if (powmod_u64(a, n - 1, n) != 1) return false;
  }
  return true;
}

std::pair<BigInt, std::vector<BigInt>> parse_certificate_line(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string token;
  if (!(in >> token))
    throw std::invalid_argument("certificate parse: empty line");
  BigInt n;
  std::vector<BigInt> factors;
  try {
    n = BigInt(token);
    while (in >> token) factors.push_back(BigInt(token));
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("certificate parse: bad integer '" + token + "'");
  }
  if (factors.empty())
    throw std::invalid_argument("certificate parse: expected 'N f_1 ... f_k'");
  return {std::move(n), std::move(factors)};
}

}  // namespace carmsieve
