#include "carmsieve/forms.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace carmsieve {

namespace {

std::string join_u64(const std::vector<uint64_t>& values, char sep) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

uint64_t checked_mul(uint64_t a, uint64_t b, const char* what) {
  const unsigned __int128 wide = static_cast<unsigned __int128>(a) * b;
  if (wide > UINT64_MAX) throw std::overflow_error(std::string(what) + " overflows 64 bits");
  return static_cast<uint64_t>(wide);
}

uint64_t checked_pow2(unsigned e, const char* what) {
  if (e >= 64) throw std::overflow_error(std::string(what) + " overflows 64 bits");
  return uint64_t{1} << e;
}

uint64_t parse_u64(std::string_view token, const char* what) {
  uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw std::invalid_argument(std::string(what) + ": bad integer '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t end = text.find(sep, start);
    if (end == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Theorem: return "theorem";
    case Provenance::Ukl: return "ukl";
    case Provenance::Wk: return "wk";
    case Provenance::Custom: return "custom";
  }
  throw std::logic_error("provenance_name: unknown value");
}

Provenance provenance_from_name(std::string_view name) {
  if (name == "theorem") return Provenance::Theorem;
  if (name == "ukl") return Provenance::Ukl;
  if (name == "wk") return Provenance::Wk;
  if (name == "custom") return Provenance::Custom;
  throw std::invalid_argument("unknown provenance '" + std::string(name) + "'");
}

ValidationReport validate_tuple(const std::vector<uint64_t>& values) {
  if (values.empty()) throw std::invalid_argument("validate_tuple: empty tuple");
  ValidationReport report;

  if (values.size() < 3) report.violations.push_back("tuple has fewer than 3 elements");

  bool increasing = values[0] >= 1;
  for (size_t i = 0; i + 1 < values.size(); ++i)
    if (values[i] >= values[i + 1]) increasing = false;
  if (!increasing) {
    report.violations.push_back("elements are not strictly increasing positive integers");
    report.pass = false;
    return report;  // the remaining conditions assume an ordered tuple
  }

  const uint64_t a_r = values.back();
  unsigned __int128 head_sum = 0;
  for (size_t i = 0; i + 1 < values.size(); ++i) head_sum += values[i];
  if (values.size() >= 2 && head_sum != a_r)
    report.violations.push_back("a_1 + ... + a_(r-1) != a_r");

  const unsigned __int128 twice_a_r = static_cast<unsigned __int128>(2) * a_r;
  for (const uint64_t a : values)
    if (twice_a_r % a != 0)
      report.violations.push_back("a_j = " + std::to_string(a) + " does not divide 2*a_r");

  uint64_t g = 0;
  for (const uint64_t a : values) g = std::gcd(g, a);
  if (g != 1)
    report.violations.push_back("gcd of tuple is " + std::to_string(g) + ", not 1");

  report.pass = report.violations.empty();
  return report;
}

CoefficientTuple make_tuple(std::vector<uint64_t> values, bool normalize) {
  if (values.empty()) throw std::invalid_argument("make_tuple: empty tuple");
  if (normalize) {
    uint64_t g = 0;
    for (const uint64_t a : values) g = std::gcd(g, a);
    if (g > 1)
      for (uint64_t& a : values) a /= g;
  }
  const ValidationReport report = validate_tuple(values);
  if (!report.pass) {
    std::string message = "invalid tuple (" + join_u64(values, ',') + ")";
    for (const std::string& v : report.violations) message += "; " + v;
    throw std::invalid_argument(message);
  }
  return CoefficientTuple{std::move(values)};
}

bool UniversalForm::unit_intercepts() const {
  return std::all_of(factors.begin(), factors.end(),
                     [](const LinearFactor& f) { return f.beta == 1; });
}

std::vector<uint64_t> UniversalForm::substituted_alphas() const {
  std::vector<uint64_t> out;
  out.reserve(factors.size());
  for (const LinearFactor& f : factors)
    out.push_back(checked_mul(substitution, f.alpha, "substituted slope"));
  return out;
}

std::string UniversalForm::serialize() const {
  if (!unit_intercepts())
    throw std::invalid_argument("serialize: form has a non-unit intercept");
  std::vector<uint64_t> alphas;
  alphas.reserve(factors.size());
  for (const LinearFactor& f : factors) alphas.push_back(f.alpha);
  std::string line(provenance_name(provenance));
  line += ' ';
  line += std::to_string(factors.size());
  line += ' ';
  line += std::to_string(substitution);
  line += ' ';
  line += join_u64(alphas, ',');
  return line;
}

UniversalForm UniversalForm::parse(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string provenance_token, alphas_token;
  size_t k = 0;
  uint64_t s = 0;
  if (!(in >> provenance_token >> k >> s >> alphas_token))
    throw std::invalid_argument("form parse: expected '<provenance> <k> <s> <alphas>'");
  std::string trailing;
  if (in >> trailing)
    throw std::invalid_argument("form parse: unexpected trailing token '" + trailing + "'");

  UniversalForm form;
  form.provenance = provenance_from_name(provenance_token);
  form.substitution = s;
  if (s < 1) throw std::invalid_argument("form parse: substitution must be >= 1");
  for (const std::string_view token : split(alphas_token, ','))
    form.factors.push_back({parse_u64(token, "form parse"), 1});
  if (form.factors.size() != k)
    throw std::invalid_argument("form parse: k = " + std::to_string(k) + " but " +
                                std::to_string(form.factors.size()) + " alphas given");
  if (k < 3) throw std::invalid_argument("form parse: k must be >= 3");
  for (size_t i = 0; i + 1 < form.factors.size(); ++i)
    if (form.factors[i].alpha >= form.factors[i + 1].alpha)
      throw std::invalid_argument("form parse: alphas must be strictly increasing");
  return form;
}

UniversalForm construct_theorem_form(const CoefficientTuple& a, unsigned k) {
  const ValidationReport report = validate_tuple(a.values);
  if (!report.pass) {
    std::string message = "construct_theorem_form: tuple fails validation";
    for (const std::string& v : report.violations) message += "; " + v;
    throw std::invalid_argument(message);
  }
  const unsigned r = static_cast<unsigned>(a.r());
  if (k < r)
    throw std::invalid_argument("construct_theorem_form: k = " + std::to_string(k) +
                                " is below the tuple length r = " + std::to_string(r));

  const uint64_t a_r = a.largest();
  UniversalForm form;
  form.provenance = Provenance::Theorem;
  for (const uint64_t a_nu : a.values)
    form.factors.push_back({checked_mul(checked_mul(2, a_r, "slope"), a_nu, "slope"), 1});
  const uint64_t a_r_sq = checked_mul(a_r, a_r, "slope");
  for (unsigned i = 1; i <= k - r; ++i)
    form.factors.push_back(
        {checked_mul(checked_pow2(i + 1, "slope"), a_r_sq, "slope"), 1});
  form.substitution = (k > r) ? checked_pow2(k - r - 1, "substitution") : 1;

  for (size_t i = 0; i + 1 < form.factors.size(); ++i)
    if (form.factors[i].alpha >= form.factors[i + 1].alpha)
      throw std::runtime_error("construct_theorem_form: slopes not strictly increasing");
  return form;
}

UniversalForm family_ukl(unsigned k, unsigned l) {
  if (l < 3) throw std::invalid_argument("family_ukl: l must be >= 3");
  if (k < l) throw std::invalid_argument("family_ukl: k must be >= l");
  std::vector<uint64_t> values = {1, checked_pow2(l - 2, "tuple element")};
  for (unsigned j = 3; j <= l; ++j)
    values.push_back(checked_mul(checked_pow2(j - 3, "tuple element"),
                                 checked_pow2(l - 2, "tuple element") + 1,
                                 "tuple element"));
  UniversalForm form = construct_theorem_form(make_tuple(std::move(values)), k);
  form.provenance = Provenance::Ukl;
  return form;
}

UniversalForm family_wk(unsigned k) {
  if (k < 3) throw std::invalid_argument("family_wk: k must be >= 3");
  UniversalForm form;
  form.provenance = Provenance::Wk;
  uint64_t pow3 = 1;  // 3^i
  form.factors.push_back({6, 1});
  for (unsigned i = 1; i + 2 <= k; ++i) {
    pow3 = checked_mul(pow3, 3, "slope");
    form.factors.push_back({checked_mul(4, pow3, "slope"), 1});
  }
  pow3 = checked_mul(pow3, 3, "slope");  // 3^(k-1)
  form.factors.push_back({checked_mul(2, pow3, "slope"), 1});
  uint64_t s = 1;
  for (unsigned i = 3; i < k; ++i) s = checked_mul(s, 3, "substitution");
  form.substitution = s;
  return form;
}

UniversalForm custom_form(std::vector<uint64_t> alphas, uint64_t substitution) {
  if (alphas.size() < 3) throw std::invalid_argument("custom_form: need at least 3 factors");
  if (substitution < 1) throw std::invalid_argument("custom_form: substitution must be >= 1");
  std::sort(alphas.begin(), alphas.end());
  if (alphas.front() < 1) throw std::invalid_argument("custom_form: slopes must be >= 1");
  for (size_t i = 0; i + 1 < alphas.size(); ++i)
    if (alphas[i] == alphas[i + 1])
      throw std::invalid_argument("custom_form: duplicate slope " + std::to_string(alphas[i]));
  UniversalForm form;
  form.provenance = Provenance::Custom;
  form.substitution = substitution;
  for (const uint64_t alpha : alphas) form.factors.push_back({alpha, 1});
  return form;
}

std::vector<BigInt> expand_linear_product(const std::vector<LinearFactor>& factors) {
  std::vector<BigInt> coef{1};
  for (const LinearFactor& f : factors) {
    std::vector<BigInt> next(coef.size() + 1, BigInt(0));
    for (size_t i = 0; i < coef.size(); ++i) {
      next[i + 1] += coef[i] * f.alpha;
      next[i] += coef[i] * f.beta;
    }
    coef = std::move(next);
  }
  return coef;
}

PolynomialExpansion expand_coefficients(const UniversalForm& form, bool substituted) {
  std::vector<LinearFactor> factors = form.factors;
  if (substituted)
    for (LinearFactor& f : factors)
      f.alpha = checked_mul(f.alpha, form.substitution, "substituted slope");
  return PolynomialExpansion{expand_linear_product(factors)};
}

VerificationReport verify_universal(const UniversalForm& form) {
  if (form.k() < 3)
    throw std::invalid_argument("verify_universal: need at least 3 factors");
  if (!form.unit_intercepts())
    throw std::invalid_argument("verify_universal: unsupported form (non-unit intercept)");

  // U(M) - 1 = M * Q(M): universality needs s*alpha_i | Q(M) for every M, so
  // that each prime factor p = s*alpha_i*M + 1 has p - 1 | U(M) - 1.
  const PolynomialExpansion expansion = expand_coefficients(form, true);
  const std::vector<BigInt>& c = expansion.coefficients;  // c[0] == 1
  VerificationReport report;
  report.verified = true;

  for (const uint64_t d : form.substituted_alphas()) {
    FactorWitness witness;
    witness.modulus = d;

    bool all_divide = true;
    for (size_t j = 1; j < c.size(); ++j)
      if (c[j] % d != 0) {
        all_divide = false;
        break;
      }
    if (all_divide) {
      witness.ok = true;
      witness.coefficient_divisibility = true;
      report.factors.push_back(witness);
      continue;
    }

    if (d > kVerifyEnumerationBound) {
      witness.inconclusive = true;
      report.factors.push_back(witness);
      report.inconclusive = true;
      report.verified = false;
      continue;
    }

    // Q(M) mod d is periodic in M with period d: check one full period.
    witness.enumerated = true;
    std::vector<uint64_t> q_mod(c.size() - 1);
    for (size_t j = 1; j < c.size(); ++j)
      q_mod[j - 1] = static_cast<uint64_t>(c[j] % d);
    witness.ok = true;
    for (uint64_t m = 1; m <= d; ++m) {
      uint64_t value = 0;
      for (size_t j = q_mod.size(); j-- > 0;) value = (value * m + q_mod[j]) % d;
      if (value != 0) {
        witness.ok = false;
        witness.counterexample = m;
        break;
      }
    }
    if (!witness.ok) {
      report.verified = false;
      if (report.smallest_counterexample == 0 ||
          witness.counterexample < report.smallest_counterexample)
        report.smallest_counterexample = witness.counterexample;
    }
    report.factors.push_back(witness);
  }

  if (report.inconclusive) report.verified = false;
  return report;
}

Evaluation evaluate(const UniversalForm& form, uint64_t m) {
  if (m < 1) throw std::invalid_argument("evaluate: m must be >= 1");
  Evaluation eval;
  eval.product = 1;
  for (const LinearFactor& f : form.factors) {
    BigInt value = BigInt(form.substitution) * f.alpha * m + f.beta;
    eval.product *= value;
    eval.factor_values.push_back(std::move(value));
  }
  return eval;
}

}  // namespace carmsieve
