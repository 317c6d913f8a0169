#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>

#include "carmsieve/forms.hpp"

using namespace carmsieve;

namespace {

std::vector<uint64_t> alphas_of(const UniversalForm& form) {
  std::vector<uint64_t> out;
  for (const LinearFactor& f : form.factors) out.push_back(f.alpha);
  return out;
}

bool mentions(const std::vector<std::string>& violations, const char* needle) {
  return std::any_of(violations.begin(), violations.end(),
                     [needle](const std::string& v) {
                       return v.find(needle) != std::string::npos;
                     });
}

}  // namespace

TEST_CASE("tuple validation") {
  CHECK(validate_tuple({1, 2, 3}).pass);
  CHECK(validate_tuple({2, 3, 10, 15}).pass);
  CHECK(validate_tuple({1, 4, 5, 10, 20}).pass);
  CHECK(validate_tuple({3, 22, 30, 110, 165}).pass);
  CHECK(validate_tuple({6, 14, 15, 70, 105}).pass);
  CHECK(validate_tuple({9, 12, 14, 28, 63, 126}).pass);
  CHECK(validate_tuple({15, 20, 21, 70, 84, 210}).pass);

  SUBCASE("too short") {
    const ValidationReport report = validate_tuple({1, 2});
    CHECK_FALSE(report.pass);
    CHECK(mentions(report.violations, "fewer than 3"));
  }
  SUBCASE("not increasing") {
    CHECK_FALSE(validate_tuple({2, 1, 3}).pass);
    CHECK_FALSE(validate_tuple({1, 1, 2}).pass);
    CHECK_FALSE(validate_tuple({0, 1, 1}).pass);
  }
  SUBCASE("sum condition") {
    const ValidationReport report = validate_tuple({1, 2, 4});
    CHECK_FALSE(report.pass);
    CHECK(mentions(report.violations, "!= a_r"));
  }
  SUBCASE("divisibility condition") {
    const ValidationReport report = validate_tuple({4, 5, 9});
    CHECK_FALSE(report.pass);
    CHECK(mentions(report.violations, "divide"));
  }
  SUBCASE("gcd condition") {
    const ValidationReport report = validate_tuple({2, 12, 28, 42});
    CHECK_FALSE(report.pass);
    CHECK(mentions(report.violations, "gcd"));
  }
}

TEST_CASE("make_tuple normalization") {
  CHECK_THROWS_AS(make_tuple({2, 12, 28, 42}), std::invalid_argument);
  const CoefficientTuple normalized = make_tuple({2, 12, 28, 42}, true);
  CHECK(normalized.values == std::vector<uint64_t>{1, 6, 14, 21});
  CHECK(normalized.r() == 4);
  CHECK(normalized.largest() == 21);
  CHECK_THROWS_AS(make_tuple({}), std::invalid_argument);
  CHECK_THROWS_AS(make_tuple({1, 2, 4}, true), std::invalid_argument);
}

TEST_CASE("theorem construction at k = r") {
  const UniversalForm chernick = construct_theorem_form(make_tuple({1, 2, 3}), 3);
  CHECK(alphas_of(chernick) == std::vector<uint64_t>{6, 12, 18});
  CHECK(chernick.substitution == 1);
  CHECK(chernick.k() == 3);
  CHECK(chernick.unit_intercepts());

  const UniversalForm form = construct_theorem_form(make_tuple({2, 3, 10, 15}), 4);
  CHECK(alphas_of(form) == std::vector<uint64_t>{60, 90, 300, 450});
  CHECK(form.substitution == 1);

  const UniversalForm normalized =
      construct_theorem_form(make_tuple({2, 12, 28, 42}, true), 4);
  CHECK(alphas_of(normalized) == std::vector<uint64_t>{42, 252, 588, 882});
}

TEST_CASE("theorem construction on the published tuple lists") {
  const std::vector<std::vector<uint64_t>> tuples = {
      {2, 3, 10, 15},          {3, 22, 30, 110, 165},    {6, 14, 15, 70, 105},
      {9, 12, 14, 28, 63, 126}, {15, 20, 21, 70, 84, 210}};
  for (const auto& values : tuples) {
    const CoefficientTuple a = make_tuple(values);
    const unsigned r = static_cast<unsigned>(a.r());
    const UniversalForm at_r = construct_theorem_form(a, r);
    CHECK(at_r.k() == r);
    CHECK(at_r.substitution == 1);
    const UniversalForm at_r1 = construct_theorem_form(a, r + 1);
    CHECK(at_r1.k() == r + 1);
    CHECK(at_r1.substitution == 1);
    CHECK(at_r1.factors.back().alpha == 4 * a.largest() * a.largest());
  }
}

TEST_CASE("theorem construction with extension factors") {
  // k = r + 1 appends 4*a_r^2*m + 1 and substitutes s = 1 (2^0)
  const UniversalForm chernick4 = construct_theorem_form(make_tuple({1, 2, 3}), 4);
  CHECK(alphas_of(chernick4) == std::vector<uint64_t>{6, 12, 18, 36});
  CHECK(chernick4.substitution == 1);

  const UniversalForm chernick5 = construct_theorem_form(make_tuple({1, 2, 3}), 5);
  CHECK(alphas_of(chernick5) == std::vector<uint64_t>{6, 12, 18, 36, 72});
  CHECK(chernick5.substitution == 2);

  const UniversalForm chernick6 = construct_theorem_form(make_tuple({1, 2, 3}), 6);
  CHECK(alphas_of(chernick6) == std::vector<uint64_t>{6, 12, 18, 36, 72, 144});
  CHECK(chernick6.substitution == 4);

  CHECK_THROWS_AS(construct_theorem_form(make_tuple({1, 2, 3}), 2),
                  std::invalid_argument);
}

TEST_CASE("built-in families") {
  const UniversalForm u44 = family_ukl(4, 4);
  CHECK(alphas_of(u44) == std::vector<uint64_t>{20, 80, 100, 200});
  CHECK(u44.substitution == 1);
  CHECK(u44.provenance == Provenance::Ukl);

  const UniversalForm u54 = family_ukl(5, 4);
  CHECK(alphas_of(u54) == std::vector<uint64_t>{20, 80, 100, 200, 400});
  CHECK(u54.substitution == 1);

  const UniversalForm u55 = family_ukl(5, 5);
  CHECK(alphas_of(u55) == std::vector<uint64_t>{72, 576, 648, 1296, 2592});
  CHECK(u55.substitution == 1);

  // l = 3 reduces to the Chernick tuple
  CHECK(alphas_of(family_ukl(3, 3)) == std::vector<uint64_t>{6, 12, 18});
  CHECK(alphas_of(family_ukl(4, 3)) == std::vector<uint64_t>{6, 12, 18, 36});

  const UniversalForm w3 = family_wk(3);
  CHECK(alphas_of(w3) == std::vector<uint64_t>{6, 12, 18});
  CHECK(w3.substitution == 1);
  CHECK(w3.provenance == Provenance::Wk);

  const UniversalForm w4 = family_wk(4);
  CHECK(alphas_of(w4) == std::vector<uint64_t>{6, 12, 36, 54});
  CHECK(w4.substitution == 3);
  CHECK(w4.substituted_alphas() == std::vector<uint64_t>{18, 36, 108, 162});

  const UniversalForm w5 = family_wk(5);
  CHECK(alphas_of(w5) == std::vector<uint64_t>{6, 12, 36, 108, 162});
  CHECK(w5.substitution == 9);

  CHECK_THROWS_AS(family_ukl(3, 4), std::invalid_argument);  // needs l <= k
  CHECK_THROWS_AS(family_ukl(4, 2), std::invalid_argument);
  CHECK_THROWS_AS(family_wk(2), std::invalid_argument);
}

TEST_CASE("serialization round-trips") {
  const UniversalForm u44 = family_ukl(4, 4);
  CHECK(u44.serialize() == "ukl 4 1 20,80,100,200");
  CHECK(UniversalForm::parse(u44.serialize()) == u44);

  const UniversalForm w4 = family_wk(4);
  CHECK(w4.serialize() == "wk 4 3 6,12,36,54");
  CHECK(UniversalForm::parse(w4.serialize()) == w4);

  const UniversalForm custom = custom_form({5, 7, 11}, 2);
  CHECK(custom.serialize() == "custom 3 2 5,7,11");
  CHECK(UniversalForm::parse(custom.serialize()) == custom);

  const UniversalForm theorem = construct_theorem_form(make_tuple({1, 2, 3}), 5);
  CHECK(UniversalForm::parse(theorem.serialize()) == theorem);

  CHECK_THROWS_AS(UniversalForm::parse("ukl 4 1"), std::invalid_argument);
  CHECK_THROWS_AS(UniversalForm::parse("ukl 4 1 20,80,100"), std::invalid_argument);
  CHECK_THROWS_AS(UniversalForm::parse("nope 3 1 6,12,18"), std::invalid_argument);
  CHECK_THROWS_AS(UniversalForm::parse("ukl 3 1 18,12,6"), std::invalid_argument);
  CHECK_THROWS_AS(UniversalForm::parse("ukl 2 1 6,12"), std::invalid_argument);
  CHECK_THROWS_AS(UniversalForm::parse("ukl 3 1 6,12,18 junk"), std::invalid_argument);
}

TEST_CASE("expansion of the Chernick product") {
  // (6m+1)(12m+1)(18m+1) = 1296 m^3 + 396 m^2 + 36 m + 1
  const PolynomialExpansion poly = expand_coefficients(family_ukl(3, 3), true);
  CHECK(poly.coefficients ==
        std::vector<BigInt>{BigInt(1), BigInt(36), BigInt(396), BigInt(1296)});
  CHECK(poly.degree() == 3);
}

TEST_CASE("expansion applies the substitution") {
  const PolynomialExpansion substituted = expand_coefficients(family_wk(4), true);
  CHECK(substituted.coefficients ==
        std::vector<BigInt>{BigInt(1), BigInt(324), BigInt(32724),
                            BigInt(1119744), BigInt(11337408)});
  const PolynomialExpansion plain = expand_coefficients(family_wk(4), false);
  CHECK(plain.coefficients[1] == BigInt(108));  // 6 + 12 + 36 + 54
}

TEST_CASE("linear coefficient of a theorem form at k = r") {
  // C_1 = sum of the alphas = 2*a_r*(a_1 + ... + a_r) = 2*a_r*(2*a_r) = 4*a_r^2
  for (const std::vector<uint64_t>& tuple :
       {std::vector<uint64_t>{2, 3, 10, 15}, std::vector<uint64_t>{6, 14, 15, 70, 105}}) {
    const CoefficientTuple a = make_tuple(tuple);
    const UniversalForm form =
        construct_theorem_form(a, static_cast<unsigned>(a.r()));
    const PolynomialExpansion poly = expand_coefficients(form, false);
    CHECK(poly.coefficients[1] == BigInt(4) * a.largest() * a.largest());
  }
  // with extension factors, C_1 = 2^(k-r+2) * a_r^2 before substitution
  const CoefficientTuple a = make_tuple({2, 3, 10, 15});
  const UniversalForm extended = construct_theorem_form(a, 6);
  const PolynomialExpansion poly = expand_coefficients(extended, false);
  CHECK(poly.coefficients[1] == BigInt(3600));  // 2^4 * 15^2
}

TEST_CASE("verify_universal accepts the classical forms") {
  for (const UniversalForm& form :
       {family_ukl(3, 3), family_ukl(4, 4), family_ukl(5, 5), family_wk(4),
        family_wk(5), construct_theorem_form(make_tuple({2, 3, 10, 15}), 6)}) {
    const VerificationReport report = verify_universal(form);
    CHECK(report.verified);
    CHECK_FALSE(report.inconclusive);
    CHECK(report.smallest_counterexample == 0);
    for (const FactorWitness& w : report.factors) {
      CHECK(w.ok);
      CHECK(w.coefficient_divisibility);  // classical forms settle on the fast path
    }
  }
}

TEST_CASE("verify_universal accepts the printed non-primitive form") {
  const UniversalForm form = custom_form({168, 1008, 2352, 3528, 7056});
  CHECK(verify_universal(form).verified);
}

TEST_CASE("verify_universal rejects near-misses") {
  SUBCASE("sum condition broken") {
    // (6m+1)(12m+1)(16m+1) - 1 = m*(1152 m^2 + 360 m + 34) and Q(1) = 1546
    // is divisible by none of 6, 12, 16
    const VerificationReport report = verify_universal(custom_form({6, 12, 16}));
    CHECK_FALSE(report.verified);
    CHECK_FALSE(report.inconclusive);
    CHECK(report.smallest_counterexample == 1);
  }
  SUBCASE("perturbed Chernick") {
    const VerificationReport report = verify_universal(custom_form({6, 12, 20}));
    CHECK_FALSE(report.verified);
    CHECK(report.smallest_counterexample == 1);
  }
  SUBCASE("perturbed quadruple form") {
    const VerificationReport report =
        verify_universal(custom_form({20, 80, 100, 202}));
    CHECK_FALSE(report.verified);
    CHECK(report.smallest_counterexample == 1);
  }
  SUBCASE("wrong substitution") {
    const VerificationReport report =
        verify_universal(custom_form({6, 12, 36, 56}, 3));
    CHECK_FALSE(report.verified);
    CHECK(report.smallest_counterexample == 1);
  }
}

TEST_CASE("expansion agrees with direct evaluation") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<uint64_t> alphas;
    while (alphas.size() < static_cast<size_t>(3 + trial % 4)) {
      const uint64_t alpha = 1 + rng() % 5000;
      if (std::find(alphas.begin(), alphas.end(), alpha) == alphas.end())
        alphas.push_back(alpha);
    }
    const UniversalForm form = custom_form(alphas, 1 + rng() % 8);
    const PolynomialExpansion poly = expand_coefficients(form, true);
    for (int i = 0; i < 20; ++i) {
      const uint64_t m = 1 + rng() % 10000;
      BigInt horner = 0;
      for (size_t j = poly.coefficients.size(); j-- > 0;)
        horner = horner * m + poly.coefficients[j];
      CHECK(horner == evaluate(form, m).product);
    }
  }
}

TEST_CASE("perturbing any slope of a verified form breaks verification") {
  const std::vector<std::vector<uint64_t>> tuples = {
      {1, 2, 3},                {2, 3, 10, 15},           {3, 22, 30, 110, 165},
      {6, 14, 15, 70, 105},     {9, 12, 14, 28, 63, 126}, {15, 20, 21, 70, 84, 210}};
  for (const auto& values : tuples) {
    const CoefficientTuple a = make_tuple(values);
    const UniversalForm form =
        construct_theorem_form(a, static_cast<unsigned>(a.r()));
    REQUIRE(verify_universal(form).verified);
    for (size_t i = 0; i < form.k(); ++i) {
      std::vector<uint64_t> alphas;
      for (const LinearFactor& f : form.factors) alphas.push_back(f.alpha);
      alphas[i] += 1;
      const VerificationReport report =
          verify_universal(custom_form(alphas, form.substitution));
      if (report.verified)
        MESSAGE("perturbed form stayed universal: ",
                custom_form(alphas, form.substitution).serialize());
      CHECK_FALSE(report.inconclusive);
    }
  }
}

TEST_CASE("verify_universal reports inconclusive beyond the enumeration bound") {
  // alphas 2,3,5 with s huge: coefficients are not all divisible and the
  // modulus s*alpha exceeds the bound, so enumeration is refused.
  const UniversalForm form = custom_form({2, 3, 5}, 20'000'000);
  const VerificationReport report = verify_universal(form);
  CHECK_FALSE(report.verified);
  CHECK(report.inconclusive);
}

TEST_CASE("evaluate") {
  const Evaluation chernick1 = evaluate(family_ukl(3, 3), 1);
  CHECK(chernick1.factor_values ==
        std::vector<BigInt>{BigInt(7), BigInt(13), BigInt(19)});
  CHECK(chernick1.product == BigInt(1729));

  const Evaluation chernick6 = evaluate(family_ukl(3, 3), 6);
  CHECK(chernick6.factor_values ==
        std::vector<BigInt>{BigInt(37), BigInt(73), BigInt(109)});
  CHECK(chernick6.product == BigInt(294409));

  const Evaluation u44 = evaluate(family_ukl(4, 4), 1);
  CHECK(u44.factor_values == std::vector<BigInt>{BigInt(21), BigInt(81),
                                                 BigInt(101), BigInt(201)});
  CHECK(u44.product == BigInt(34532001));

  const Evaluation w4 = evaluate(family_wk(4), 1);
  CHECK(w4.factor_values == std::vector<BigInt>{BigInt(19), BigInt(37),
                                                BigInt(109), BigInt(163)});
  CHECK(w4.product == BigInt(12490201));

  CHECK_THROWS_AS(evaluate(family_ukl(3, 3), 0), std::invalid_argument);
}

TEST_CASE("provenance names") {
  CHECK(provenance_name(Provenance::Theorem) == "theorem");
  CHECK(provenance_name(Provenance::Ukl) == "ukl");
  CHECK(provenance_name(Provenance::Wk) == "wk");
  CHECK(provenance_name(Provenance::Custom) == "custom");
  CHECK(provenance_from_name("wk") == Provenance::Wk);
  CHECK_THROWS_AS(provenance_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("custom_form rejects duplicates and zeros") {
  CHECK_THROWS_AS(custom_form({6, 6, 12}), std::invalid_argument);
  CHECK_THROWS_AS(custom_form({}), std::invalid_argument);
  CHECK_THROWS_AS(custom_form({0, 6, 12}), std::invalid_argument);
  CHECK_THROWS_AS(custom_form({6, 12, 18}, 0), std::invalid_argument);
}
