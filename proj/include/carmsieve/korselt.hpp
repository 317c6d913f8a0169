#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "carmsieve/bigint.hpp"

namespace carmsieve {

struct FactorCheckRecord {
  BigInt factor;
  bool prime = false;
  bool probable = false;  // primality asserted probabilistically (factor > 2^64 - 1)
  bool divides = false;   // (p - 1) | (N - 1)
};

struct CarmichaelCertificate {
  BigInt n;
  std::vector<BigInt> factors;  // ascending
  std::vector<FactorCheckRecord> checks;
};

struct KorseltResult {
  bool accepted = false;
  std::vector<std::string> reasons;  // empty iff accepted
  CarmichaelCertificate certificate;
};

// Korselt's criterion: N odd, composite with >= 3 distinct prime factors,
// squarefree, and (p - 1) | (N - 1) for every prime p | N. The factors must
// multiply to n exactly; a mismatched factorization is an argument error
// (std::invalid_argument), not a criterion failure.
KorseltResult korselt_check(const BigInt& n, std::vector<BigInt> factors);

// Ground-truth Fermat check, computed literally: n is composite and
// a^(n-1) == 1 (mod n) for every 1 < a < n coprime to n. Exits at the first
// witness, so composites answer quickly while a true verdict has examined
// every base. Quadratic-ish in n; refuses n > bound.
bool carmichael_oracle(uint64_t n, uint64_t bound = 10'000'000);

// "N f_1 f_2 ... f_k" (whitespace separated decimal integers).
std::pair<BigInt, std::vector<BigInt>> parse_certificate_line(std::string_view line);

}  // namespace carmsieve
