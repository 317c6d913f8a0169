#pragma once

#include <cstdint>
#include <vector>

#include "carmsieve/bigint.hpp"
#include "carmsieve/forms.hpp"

namespace carmsieve {

// Montgomery modular arithmetic for an odd 64-bit modulus; see Peter L.
// Montgomery, "Modular multiplication without trial division", Math. Comp. 44
// (1985). Values live in Montgomery form (x * 2^64 mod p).
class MontArith {
 public:
  explicit MontArith(uint64_t p);

  uint64_t p() const { return p_; }
  uint64_t one() const { return one_; }
  uint64_t minus_one() const { return p_ - one_; }

  uint64_t to_mont(uint64_t a) const { return mul(a, r2_); }

  uint64_t add(uint64_t a, uint64_t b) const {
    const uint64_t r = a + b;
    return (r < a || r >= p_) ? r - p_ : r;
  }

  uint64_t sub(uint64_t a, uint64_t b) const {
    return (a >= b) ? a - b : a + (p_ - b);
  }

  uint64_t mul(uint64_t a, uint64_t b) const {
    return redc(static_cast<unsigned __int128>(a) * b);
  }

  // a in Montgomery form; returns a^e in Montgomery form.
  uint64_t pow(uint64_t a, uint64_t e) const;

 private:
  uint64_t redc(unsigned __int128 t) const {
    // q_ = p^-1 (mod 2^64), so m*p == t (mod 2^64) and the low word cancels.
    const uint64_t m = static_cast<uint64_t>(t) * q_;
    const uint64_t t_hi = static_cast<uint64_t>(t >> 64);
    const uint64_t mp = static_cast<uint64_t>(
        (static_cast<unsigned __int128>(m) * p_) >> 64);
    return (t_hi < mp) ? t_hi - mp + p_ : t_hi - mp;
  }

  uint64_t p_, q_, one_, r2_;
};

struct PrimeTable {
  uint64_t limit = 0;
  std::vector<uint64_t> primes;
};

// Odds-only sieve of Eratosthenes; memory is one bit per odd number <= limit.
PrimeTable sieve_primes(uint64_t limit);

// Deterministic for every 64-bit n: strong-probable-prime test to the seven
// bases {2, 325, 9375, 28178, 450775, 9780504, 1795265022} (Sinclair's set,
// verified against the Feitsma-Galway pseudoprime tables to cover all
// n < 2^64).
bool is_prime_64(uint64_t n);

// Miller-Rabin with `rounds` bases (base 2 first, then bases drawn from a
// generator seeded deterministically from n). A false result is definitive;
// a true result errs with probability < 4^-rounds.
bool is_probable_prime_big(const BigInt& n, unsigned rounds);

// Residue classes of M (mod the product of the wheel primes) that cannot be
// excluded: a class is dropped only when some factor s*alpha_i*M + beta_i is
// divisible by a wheel prime for every M in the class. The finitely many M
// where a factor *equals* a wheel prime are collected as exceptions and must
// be scanned individually.
struct ResidueWheel {
  uint64_t modulus = 1;
  std::vector<uint64_t> wheel_primes;
  std::vector<uint64_t> admissible;  // sorted residues mod modulus
  std::vector<uint64_t> exceptions;  // sorted M values

  bool admits(uint64_t m) const;
};

ResidueWheel build_wheel(const UniversalForm& form,
                         const std::vector<uint64_t>& wheel_primes);

}  // namespace carmsieve
