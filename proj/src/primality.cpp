#include "carmsieve/primality.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>

namespace carmsieve {

namespace {

// p * p_inv = 1 (mod 2^64) (Newton's method)
uint64_t invert(uint64_t p) {
  uint64_t p_inv = 1, prev = 0;
  while (p_inv != prev) {
    prev = p_inv;
    p_inv *= 2 - p * p_inv;
  }
  return p_inv;
}

}  // namespace

MontArith::MontArith(uint64_t p) : p_(p) {
  if (p < 3 || p % 2 == 0) throw std::invalid_argument("MontArith: modulus must be odd and > 1");
  q_ = invert(p);
  one_ = (-p) % p;
  // 2^64 in Montgomery form is 2^128 mod p: square up from 2^4.
  uint64_t t = add(one_, one_);
  t = add(t, t);      // 4
  t = add(t, t);      // 8
  t = add(t, t);      // 16
  for (int i = 0; i < 4; ++i) t = mul(t, t);  // 16^(2^4) = 2^64
  r2_ = t;
}

uint64_t MontArith::pow(uint64_t a, uint64_t e) const {
  if (e == 0) return one_;
  uint64_t r = a;
  for (int bit = std::bit_width(e) - 2; bit >= 0; --bit) {
    r = mul(r, r);
    if ((e >> bit) & 1) r = mul(r, a);
  }
  return r;
}

PrimeTable sieve_primes(uint64_t limit) {
  if (limit < 2) throw std::invalid_argument("sieve_primes: limit must be >= 2");
  PrimeTable table;
  table.limit = limit;
  table.primes.push_back(2);
  if (limit < 3) return table;

  // composite[i] marks 2i + 3.
  const uint64_t count = (limit - 1) / 2;  // odd numbers 3, 5, ..., <= limit
  std::vector<bool> composite(count, false);
  for (uint64_t i = 0;; ++i) {
    const uint64_t p = 2 * i + 3;
    if (p > limit / p) break;
    if (composite[i]) continue;
    for (uint64_t j = (p * p - 3) / 2; j < count; j += p) composite[j] = true;
  }
  for (uint64_t i = 0; i < count; ++i)
    if (!composite[i]) table.primes.push_back(2 * i + 3);
  return table;
}

namespace {

constexpr uint64_t kSmallPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Covers all n < 2^64 (Sinclair; checked against the Feitsma-Galway tables).
constexpr uint64_t kWitnesses64[] = {2,      325,     9375,      28178,
                                     450775, 9780504, 1795265022};

bool strong_probable_prime(const MontArith& mont, uint64_t base) {
  const uint64_t n = mont.p();
  const uint64_t reduced = base % n;
  if (reduced == 0) return true;
  uint64_t d = n - 1;
  const int s = std::countr_zero(d);
  d >>= s;
  uint64_t x = mont.pow(mont.to_mont(reduced), d);
  if (x == mont.one() || x == mont.minus_one()) return true;
  for (int r = 1; r < s; ++r) {
    x = mont.mul(x, x);
    if (x == mont.minus_one()) return true;
  }
  return false;
}

}  // namespace

bool is_prime_64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;
  const MontArith mont(n);
  for (uint64_t a : kWitnesses64)
    if (!strong_probable_prime(mont, a)) return false;
  return true;
}

bool is_probable_prime_big(const BigInt& n, unsigned rounds) {
  if (rounds == 0) throw std::invalid_argument("is_probable_prime_big: rounds must be >= 1");
  if (n <= 0) throw std::invalid_argument("is_probable_prime_big: n must be positive");
  if (n < 2) return false;
  for (uint64_t p : kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;

  BigInt d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  const BigInt n_minus_1 = n - 1;

  // Deterministic bases: 2 first, then draws seeded from n itself so results
  // are reproducible.
  std::mt19937_64 rng(static_cast<uint64_t>(n % ((BigInt(1) << 64) - 1)) ^
                      (0x9e3779b97f4a7c15ull * msb(n)));
  const BigInt span = n - 4;  // bases in [2, n-2]

  for (unsigned round = 0; round < rounds; ++round) {
    BigInt a;
    if (round == 0) {
      a = 2;
    } else {
      BigInt raw = 0;
      for (size_t bits = 0; bits <= msb(n); bits += 64) raw = (raw << 64) | rng();
      a = 2 + raw % (span + 1);
    }
    BigInt x = boost::multiprecision::powm(a, d, n);
    if (x == 1 || x == n_minus_1) continue;
    bool witness = true;
    for (unsigned r = 1; r < s; ++r) {
      x = (x * x) % n;
      if (x == n_minus_1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

bool ResidueWheel::admits(uint64_t m) const {
  if (modulus <= 1) return true;
  const uint64_t r = m % modulus;
  return std::binary_search(admissible.begin(), admissible.end(), r);
}

ResidueWheel build_wheel(const UniversalForm& form,
                         const std::vector<uint64_t>& wheel_primes) {
  ResidueWheel wheel;
  wheel.wheel_primes = wheel_primes;
  std::sort(wheel.wheel_primes.begin(), wheel.wheel_primes.end());
  for (size_t i = 0; i < wheel.wheel_primes.size(); ++i) {
    const uint64_t p = wheel.wheel_primes[i];
    if (!is_prime_64(p))
      throw std::invalid_argument("build_wheel: wheel entry " + std::to_string(p) +
                                  " is not prime");
    if (i > 0 && wheel.wheel_primes[i] == wheel.wheel_primes[i - 1])
      throw std::invalid_argument("build_wheel: duplicate wheel prime " + std::to_string(p));
  }

  const uint64_t s = form.substitution;
  std::vector<uint64_t> sa;
  std::vector<int64_t> betas;
  for (const LinearFactor& f : form.factors) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(s) * f.alpha;
    if (wide > UINT64_MAX)
      throw std::invalid_argument("build_wheel: substituted slope overflows 64 bits");
    sa.push_back(static_cast<uint64_t>(wide));
    betas.push_back(f.beta);
  }

  // Admissible residues per prime, then combined by CRT.
  std::vector<std::vector<uint64_t>> per_prime;
  unsigned __int128 projected = 1;
  for (const uint64_t p : wheel.wheel_primes) {
    std::vector<uint64_t> ok;
    for (uint64_t r = 0; r < p; ++r) {
      bool excluded = false;
      for (size_t i = 0; i < sa.size() && !excluded; ++i) {
        const uint64_t slope = sa[i] % p;
        if (slope == 0) continue;  // this factor never vanishes mod p
        const uint64_t intercept =
            static_cast<uint64_t>(((betas[i] % static_cast<int64_t>(p)) +
                                   static_cast<int64_t>(p)) %
                                  static_cast<int64_t>(p));
        if ((static_cast<unsigned __int128>(slope) * r + intercept) % p == 0)
          excluded = true;
      }
      if (!excluded) ok.push_back(r);
    }
    projected *= ok.size();
    if (projected > (1u << 26))
      throw std::invalid_argument("build_wheel: admissible set too large to enumerate");
    per_prime.push_back(std::move(ok));
  }

  unsigned __int128 modulus = 1;
  for (const uint64_t p : wheel.wheel_primes) {
    modulus *= p;
    if (modulus > UINT64_MAX)
      throw std::invalid_argument("build_wheel: wheel modulus overflows 64 bits");
  }
  wheel.modulus = static_cast<uint64_t>(modulus);

  wheel.admissible = {0};
  uint64_t partial = 1;
  for (size_t i = 0; i < wheel.wheel_primes.size(); ++i) {
    const uint64_t p = wheel.wheel_primes[i];
    std::vector<uint64_t> next;
    next.reserve(wheel.admissible.size() * per_prime[i].size());
    // x = a (mod partial), x = r (mod p): step through a, a+partial, ...
    for (const uint64_t a : wheel.admissible)
      for (uint64_t x = a; x < partial * p; x += partial)
        if (std::binary_search(per_prime[i].begin(), per_prime[i].end(), x % p))
          next.push_back(x);
    partial *= p;
    wheel.admissible = std::move(next);
  }
  std::sort(wheel.admissible.begin(), wheel.admissible.end());

  for (const uint64_t p : wheel.wheel_primes) {
    for (size_t i = 0; i < sa.size(); ++i) {
      // s*alpha*M + beta = p has at most one integer solution M >= 1.
      const __int128 numer = static_cast<__int128>(p) - betas[i];
      if (numer <= 0 || sa[i] == 0) continue;
      if (static_cast<unsigned __int128>(numer) % sa[i] == 0) {
        const uint64_t m =
            static_cast<uint64_t>(static_cast<unsigned __int128>(numer) / sa[i]);
        if (m >= 1) wheel.exceptions.push_back(m);
      }
    }
  }
  std::sort(wheel.exceptions.begin(), wheel.exceptions.end());
  wheel.exceptions.erase(std::unique(wheel.exceptions.begin(), wheel.exceptions.end()),
                         wheel.exceptions.end());
  return wheel;
}

}  // namespace carmsieve
