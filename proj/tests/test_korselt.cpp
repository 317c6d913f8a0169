#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>

#include "carmsieve/korselt.hpp"
#include "carmsieve/primality.hpp"

using namespace carmsieve;

namespace {

std::vector<BigInt> factorize(uint64_t n) {
  std::vector<BigInt> factors;
  for (uint64_t d = 2; d * d <= n; ++d)
    while (n % d == 0) {
      factors.emplace_back(d);
      n /= d;
    }
  if (n > 1) factors.emplace_back(n);
  return factors;
}

bool reasons_mention(const KorseltResult& result, const char* needle) {
  return std::any_of(result.reasons.begin(), result.reasons.end(),
                     [needle](const std::string& r) {
                       return r.find(needle) != std::string::npos;
                     });
}

}  // namespace

TEST_CASE("korselt_check accepts the classical Carmichael numbers") {
  const uint64_t carmichaels[] = {561,   1105,  1729,  2465,  2821,  6601,
                                  8911,  10585, 15841, 29341, 41041, 46657,
                                  52633, 62745, 63973, 75361};
  for (const uint64_t n : carmichaels) {
    const KorseltResult result = korselt_check(BigInt(n), factorize(n));
    CHECK(result.accepted);
    CHECK(result.reasons.empty());
    CHECK(result.certificate.n == BigInt(n));
    for (const FactorCheckRecord& check : result.certificate.checks) {
      CHECK(check.prime);
      CHECK(check.divides);
      CHECK_FALSE(check.probable);  // all factors fit well below 2^63
    }
  }
}

TEST_CASE("korselt_check rejections name the failed condition") {
  SUBCASE("even") {
    const KorseltResult result =
        korselt_check(BigInt(2) * 3 * 5, {BigInt(2), BigInt(3), BigInt(5)});
    CHECK_FALSE(result.accepted);
    CHECK(reasons_mention(result, "even"));
  }
  SUBCASE("prime") {
    const KorseltResult result = korselt_check(BigInt(97), {BigInt(97)});
    CHECK_FALSE(result.accepted);
    CHECK(reasons_mention(result, "fewer than 3"));
  }
  SUBCASE("two prime factors") {
    const KorseltResult result = korselt_check(BigInt(15), {BigInt(3), BigInt(5)});
    CHECK_FALSE(result.accepted);
    CHECK(reasons_mention(result, "fewer than 3"));
  }
  SUBCASE("not squarefree") {
    const KorseltResult result =
        korselt_check(BigInt(3) * 3 * 5 * 7, {BigInt(3), BigInt(3), BigInt(5), BigInt(7)});
    CHECK_FALSE(result.accepted);
    CHECK(reasons_mention(result, "repeated"));
  }
  SUBCASE("composite factor") {
    const KorseltResult result =
        korselt_check(BigInt(3) * 5 * 9, {BigInt(3), BigInt(5), BigInt(9)});
    CHECK_FALSE(result.accepted);
    CHECK(reasons_mention(result, "not prime"));
  }
  SUBCASE("divisibility fails") {
    // 3 * 5 * 7 = 105: 4 does not divide 104
    const KorseltResult result =
        korselt_check(BigInt(105), {BigInt(3), BigInt(5), BigInt(7)});
    CHECK_FALSE(result.accepted);
    CHECK(reasons_mention(result, "does not divide"));
  }
}

TEST_CASE("korselt_check validates the factorization product") {
  CHECK_THROWS_AS(korselt_check(BigInt(561), {BigInt(3), BigInt(11)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(korselt_check(BigInt(561), {BigInt(3), BigInt(11), BigInt(19)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(korselt_check(BigInt(561), {}), std::invalid_argument);
}

TEST_CASE("korselt_check accepts factors in any order") {
  const KorseltResult result =
      korselt_check(BigInt(561), {BigInt(17), BigInt(3), BigInt(11)});
  CHECK(result.accepted);
  CHECK(result.certificate.factors ==
        std::vector<BigInt>{BigInt(3), BigInt(11), BigInt(17)});
}

TEST_CASE("korselt_check flags factors beyond 64 bits as probable") {
  const BigInt p1("18446744073709551557");  // largest 64-bit prime
  const BigInt p2("18446744073709551629");  // first prime above 2^64
  const BigInt n = p1 * p2 * 3;
  const KorseltResult result = korselt_check(n, {BigInt(3), p1, p2});
  CHECK_FALSE(result.accepted);  // divisibility cannot hold here
  REQUIRE(result.certificate.checks.size() == 3);
  CHECK(result.certificate.checks[0].prime);
  CHECK_FALSE(result.certificate.checks[0].probable);
  CHECK(result.certificate.checks[1].prime);
  CHECK_FALSE(result.certificate.checks[1].probable);  // still fits 64 bits
  CHECK(result.certificate.checks[2].prime);
  CHECK(result.certificate.checks[2].probable);
}

TEST_CASE("carmichael_oracle matches the classical list below 10^5") {
  std::vector<uint64_t> found;
  for (uint64_t n = 3; n <= 100000; n += 2)
    if (carmichael_oracle(n)) found.push_back(n);
  CHECK(found == std::vector<uint64_t>{561, 1105, 1729, 2465, 2821, 6601, 8911,
                                       10585, 15841, 29341, 41041, 46657, 52633,
                                       62745, 63973, 75361});
}

TEST_CASE("carmichael_oracle agrees with korselt_check on every odd composite") {
  for (uint64_t n = 9; n <= 20000; n += 2) {
    const std::vector<BigInt> factors = factorize(n);
    if (factors.size() < 2) continue;  // prime: oracle requires compositeness
    const bool korselt = korselt_check(BigInt(n), factors).accepted;
    CHECK(korselt == carmichael_oracle(n));
  }
}

TEST_CASE("carmichael_oracle refuses out-of-range input") {
  CHECK_THROWS_AS(carmichael_oracle(20'000'001, 20'000'000), std::invalid_argument);
  CHECK_FALSE(carmichael_oracle(2));
  CHECK_FALSE(carmichael_oracle(97));   // prime
  CHECK_FALSE(carmichael_oracle(9));    // too few factors, Fermat fails anyway
}

TEST_CASE("parse_certificate_line") {
  const auto [n, factors] = parse_certificate_line("561 3 11 17");
  CHECK(n == BigInt(561));
  CHECK(factors == std::vector<BigInt>{BigInt(3), BigInt(11), BigInt(17)});

  const auto [big_n, big_factors] =
      parse_certificate_line("  294409   37  73 109 ");
  CHECK(big_n == BigInt(294409));
  CHECK(big_factors.size() == 3);

  CHECK_THROWS_AS(parse_certificate_line(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_certificate_line("561"), std::invalid_argument);
  CHECK_THROWS_AS(parse_certificate_line("561 3 x 17"), std::invalid_argument);
}
