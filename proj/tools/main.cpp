#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "carmsieve/estimate.hpp"
#include "carmsieve/forms.hpp"
#include "carmsieve/korselt.hpp"
#include "carmsieve/report.hpp"
#include "carmsieve/search.hpp"

namespace {

using namespace carmsieve;

struct FormSelection {
  std::string family;
  std::vector<uint64_t> tuple;
  std::vector<uint64_t> alphas;
  uint64_t k = 0;
  uint64_t l = 0;
  uint64_t s = 1;
  bool normalize = false;
};

void add_form_options(CLI::App* cmd, FormSelection& sel) {
  cmd->add_option("--family", sel.family, "built-in family: ukl or wk")
      ->check(CLI::IsMember({"ukl", "wk"}));
  cmd->add_option("--k", sel.k, "number of linear factors");
  cmd->add_option("--l", sel.l, "tuple length for the ukl family");
  cmd->add_option("--tuple", sel.tuple, "coefficient tuple a_1,...,a_r")
      ->delimiter(',');
  cmd->add_flag("--normalize", sel.normalize,
                "divide the tuple by its gcd before validation");
  cmd->add_option("--alphas", sel.alphas, "slopes of a custom form")->delimiter(',');
  cmd->add_option("--s", sel.s, "substitution multiplier for custom forms");
}

UniversalForm resolve_form(const FormSelection& sel) {
  const int sources = (sel.family.empty() ? 0 : 1) + (sel.tuple.empty() ? 0 : 1) +
                      (sel.alphas.empty() ? 0 : 1);
  if (sources != 1)
    throw std::invalid_argument(
        "specify exactly one of --family, --tuple, or --alphas");

  if (!sel.family.empty()) {
    if (sel.k == 0) throw std::invalid_argument("--family requires --k");
    if (sel.family == "ukl") {
      if (sel.l == 0) throw std::invalid_argument("--family ukl requires --l");
      return family_ukl(static_cast<unsigned>(sel.k), static_cast<unsigned>(sel.l));
    }
    return family_wk(static_cast<unsigned>(sel.k));
  }
  if (!sel.tuple.empty()) {
    const CoefficientTuple tuple = make_tuple(sel.tuple, sel.normalize);
    const unsigned k = sel.k ? static_cast<unsigned>(sel.k)
                             : static_cast<unsigned>(tuple.r());
    return construct_theorem_form(tuple, k);
  }
  return custom_form(sel.alphas, sel.s);
}

std::vector<unsigned> parse_decades(const std::string& text) {
  const auto parse_one = [](const std::string& tok) {
    size_t pos = 0;
    const int value = std::stoi(tok, &pos);
    if (pos != tok.size() || value < 1 || value > 18)
      throw std::invalid_argument("--decades: bad decade '" + tok + "'");
    return static_cast<unsigned>(value);
  };
  const size_t dots = text.find("..");
  std::vector<unsigned> decades;
  if (dots == std::string::npos) {
    decades.push_back(parse_one(text));
    return decades;
  }
  const unsigned lo = parse_one(text.substr(0, dots));
  const unsigned hi = parse_one(text.substr(dots + 2));
  if (lo > hi) throw std::invalid_argument("--decades: range is backwards");
  for (unsigned d = lo; d <= hi; ++d) decades.push_back(d);
  return decades;
}

SearchOptions make_search_options(const UniversalForm& form, unsigned threads,
                                  bool no_wheel,
                                  const std::vector<uint64_t>& wheel_primes,
                                  bool force) {
  SearchOptions options;
  options.threads = threads;
  options.force_unverified = force;
  if (!no_wheel) {
    const std::vector<uint64_t> primes =
        wheel_primes.empty() ? default_wheel_primes(form) : wheel_primes;
    if (!primes.empty()) options.wheel = build_wheel(form, primes);
  }
  return options;
}

void attach_progress(SearchOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  options.on_chunk = [start](uint64_t last_m, const std::vector<uint64_t>& hits) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cerr << "progress: scanned M <= " << last_m << ", hits " << hits.size()
              << ", " << static_cast<uint64_t>(last_m / std::max(elapsed, 1e-9))
              << " M/s\n";
  };
}

void print_hit_csv(std::ostream& out, const UniversalForm& form, uint64_t m) {
  const Evaluation eval = evaluate(form, m);
  out << m;
  for (const BigInt& f : eval.factor_values) out << ',' << f;
  out << ',' << eval.product << '\n';
}

SingularConstant resolve_constant(const UniversalForm& form, double override_value,
                                  uint64_t cutoff) {
  if (override_value > 0) return {override_value, 0, 0};
  return singular_constant(form, cutoff);
}

int run_korselt_line(const std::string& line, bool& any_error) {
  try {
    const auto [n, factors] = parse_certificate_line(line);
    const KorseltResult result = korselt_check(n, factors);
    if (result.accepted) {
      std::cout << "accept " << n << '\n';
    } else {
      std::cout << "reject " << n << ": ";
      for (size_t i = 0; i < result.reasons.size(); ++i) {
        if (i) std::cout << "; ";
        std::cout << result.reasons[i];
      }
      std::cout << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    any_error = true;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carmsieve: Carmichael numbers from universal forms"};
  app.require_subcommand(1);
  app.fallthrough();

  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads for searches")
      ->capture_default_str();

  // construct
  auto* construct_cmd =
      app.add_subcommand("construct", "build a form and print its serialization");
  auto construct_sel = std::make_shared<FormSelection>();
  add_form_options(construct_cmd, *construct_sel);
  construct_cmd->callback(
      [construct_sel] { std::cout << resolve_form(*construct_sel).serialize() << '\n'; });

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "check the universal-form divisibility property");
  auto verify_sel = std::make_shared<FormSelection>();
  add_form_options(verify_cmd, *verify_sel);
  verify_cmd->callback([verify_sel] {
    const UniversalForm form = resolve_form(*verify_sel);
    const VerificationReport report = verify_universal(form);
    if (report.verified) {
      std::cout << "verified\n";
      return;
    }
    if (report.inconclusive) {
      std::cout << "inconclusive: a factor modulus exceeds the enumeration bound\n";
      return;
    }
    std::cout << "not verified: smallest counterexample M="
              << report.smallest_counterexample << '\n';
    for (const FactorWitness& w : report.factors)
      if (!w.ok && !w.inconclusive)
        std::cout << "  modulus " << w.modulus << " fails at M=" << w.counterexample
                  << '\n';
  });

  // search
  auto* search_cmd = app.add_subcommand("search", "scan M for all-prime factor values");
  auto search_sel = std::make_shared<FormSelection>();
  add_form_options(search_cmd, *search_sel);
  auto search_from = std::make_shared<uint64_t>(1);
  auto search_to = std::make_shared<uint64_t>(1000000);
  auto search_force = std::make_shared<bool>(false);
  auto search_no_wheel = std::make_shared<bool>(false);
  auto search_wheel_primes = std::make_shared<std::vector<uint64_t>>();
  auto search_checkpoint = std::make_shared<std::string>();
  search_cmd->add_option("--from", *search_from, "first M")->capture_default_str();
  search_cmd->add_option("--to", *search_to, "last M")->capture_default_str();
  search_cmd->add_flag("--force", *search_force, "search even if the form is unverified");
  search_cmd->add_flag("--no-wheel", *search_no_wheel, "disable the residue wheel");
  search_cmd->add_option("--wheel-primes", *search_wheel_primes,
                         "override the wheel primes")
      ->delimiter(',');
  search_cmd->add_option("--checkpoint", *search_checkpoint,
                         "checkpoint file to write and resume from");
  search_cmd->callback([=, &threads] {
    const UniversalForm form = resolve_form(*search_sel);
    if (*search_from < 1 || *search_from > *search_to)
      throw std::invalid_argument("need 1 <= --from <= --to");
    SearchOptions options = make_search_options(form, threads, *search_no_wheel,
                                                *search_wheel_primes, *search_force);
    attach_progress(options);

    std::vector<uint64_t> all_hits;
    uint64_t start = *search_from;
    SearchCheckpoint cp;
    const bool use_checkpoint = !search_checkpoint->empty();
    if (use_checkpoint) {
      if (*search_from != 1)
        throw std::invalid_argument("checkpoints track scans from M=1; omit --from");
      cp.form_line = form.serialize();
      if (std::filesystem::exists(*search_checkpoint)) {
        cp = load_checkpoint(*search_checkpoint);
        if (cp.form_line != form.serialize())
          throw std::invalid_argument("checkpoint is for form '" + cp.form_line +
                                      "', not '" + form.serialize() + "'");
        start = cp.last_m + 1;
        std::cerr << "resumed from M=" << cp.last_m << " with " << cp.hits.size()
                  << " hits\n";
      }
      const std::vector<uint64_t> prior = cp.hits;
      const auto progress = options.on_chunk;
      const std::string path = *search_checkpoint;
      options.on_chunk = [prior, progress, path,
                          &cp](uint64_t last_m, const std::vector<uint64_t>& hit_ms) {
        cp.hits = prior;
        cp.hits.insert(cp.hits.end(), hit_ms.begin(), hit_ms.end());
        cp.last_m = last_m;
        save_checkpoint(cp, path);
        if (progress) progress(last_m, cp.hits);
      };
    }

    all_hits = cp.hits;  // hits recorded by a resumed checkpoint
    if (start <= *search_to) {
      std::vector<CandidateHit> found =
          search_range(form, start, *search_to, options);
      for (const CandidateHit& hit : found) {
        all_hits.push_back(hit.m);
        if (!hit.certified)
          std::cerr << "warning: M=" << hit.m
                    << ": factors are prime but the product fails its certificate\n";
      }
      if (use_checkpoint) {
        cp.last_m = std::max(cp.last_m, *search_to);
        cp.hits = all_hits;
        save_checkpoint(cp, *search_checkpoint);
      }
    }
    for (const uint64_t m : all_hits)
      if (m >= *search_from && m <= *search_to) print_hit_csv(std::cout, form, m);
  });

  // estimate
  auto* estimate_cmd = app.add_subcommand("estimate", "expected hit counts per decade");
  auto estimate_sel = std::make_shared<FormSelection>();
  add_form_options(estimate_cmd, *estimate_sel);
  auto estimate_decades = std::make_shared<std::string>("3..6");
  auto estimate_method = std::make_shared<std::string>("sum");
  auto estimate_cutoff = std::make_shared<uint64_t>(10000000);
  auto estimate_constant = std::make_shared<double>(0);
  estimate_cmd->add_option("--decades", *estimate_decades, "decade or range, e.g. 3..6")
      ->capture_default_str();
  estimate_cmd->add_option("--method", *estimate_method, "sum or integral")
      ->check(CLI::IsMember({"sum", "integral"}))
      ->capture_default_str();
  estimate_cmd->add_option("--cutoff", *estimate_cutoff,
                           "prime cutoff for the singular constant")
      ->capture_default_str();
  estimate_cmd->add_option("--constant", *estimate_constant,
                           "override the singular constant");
  estimate_cmd->callback([=] {
    const UniversalForm form = resolve_form(*estimate_sel);
    const std::vector<unsigned> decades = parse_decades(*estimate_decades);
    const SingularConstant constant =
        resolve_constant(form, *estimate_constant, *estimate_cutoff);

    std::vector<uint64_t> limits;
    for (const unsigned d : decades) {
      uint64_t limit = 1;
      for (unsigned i = 0; i < d; ++i) limit *= 10;
      limits.push_back(limit);
    }
    std::vector<EstimateRow> rows;
    if (*estimate_method == "sum") {
      rows = estimate_sum_rows(form, constant, limits);
    } else {
      for (const uint64_t limit : limits)
        rows.push_back(estimate_by_integral(form, constant, limit));
    }
    std::cout << "M,E,rounded_E,method,constant,cutoff\n";
    char buffer[64];
    for (const EstimateRow& row : rows) {
      std::snprintf(buffer, sizeof(buffer), "%.6f", row.estimate);
      std::cout << row.m_limit << ',' << buffer << ',' << row.rounded << ','
                << *estimate_method << ',';
      std::snprintf(buffer, sizeof(buffer), "%.6f", constant.value);
      std::cout << buffer << ',' << constant.cutoff << '\n';
    }
  });

  // korselt
  auto* korselt_cmd =
      app.add_subcommand("korselt", "check 'N f_1 ... f_k' certificates");
  auto korselt_lines = std::make_shared<std::vector<std::string>>();
  korselt_cmd->add_option("lines", *korselt_lines,
                          "certificate lines (reads stdin when omitted)");
  korselt_cmd->callback([korselt_lines] {
    bool any_error = false;
    if (korselt_lines->empty()) {
      std::string line;
      while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        run_korselt_line(line, any_error);
      }
    } else {
      for (const std::string& line : *korselt_lines) run_korselt_line(line, any_error);
    }
    if (any_error) throw std::invalid_argument("some certificate lines were malformed");
  });

  // report
  auto* report_cmd =
      app.add_subcommand("report", "estimated vs actual counts per decade");
  auto report_sel = std::make_shared<FormSelection>();
  add_form_options(report_cmd, *report_sel);
  auto report_decades = std::make_shared<std::string>("3..6");
  auto report_method = std::make_shared<std::string>("integral");
  auto report_cutoff = std::make_shared<uint64_t>(10000000);
  auto report_constant = std::make_shared<double>(0);
  auto report_format = std::make_shared<std::string>("table");
  auto report_checkpoint = std::make_shared<std::string>();
  auto report_no_wheel = std::make_shared<bool>(false);
  report_cmd->add_option("--decades", *report_decades, "decade or range, e.g. 3..6")
      ->capture_default_str();
  report_cmd->add_option("--method", *report_method, "sum or integral")
      ->check(CLI::IsMember({"sum", "integral"}))
      ->capture_default_str();
  report_cmd->add_option("--cutoff", *report_cutoff,
                         "prime cutoff for the singular constant")
      ->capture_default_str();
  report_cmd->add_option("--constant", *report_constant,
                         "override the singular constant");
  report_cmd->add_option("--format", *report_format, "table or csv")
      ->check(CLI::IsMember({"table", "csv"}))
      ->capture_default_str();
  report_cmd->add_option("--checkpoint", *report_checkpoint,
                         "checkpoint file to write and resume from");
  report_cmd->add_flag("--no-wheel", *report_no_wheel, "disable the residue wheel");
  report_cmd->callback([=, &threads] {
    const UniversalForm form = resolve_form(*report_sel);
    const std::vector<unsigned> decades = parse_decades(*report_decades);
    SearchOptions options =
        make_search_options(form, threads, *report_no_wheel, {}, false);
    attach_progress(options);

    std::optional<SearchCheckpoint> resume;
    std::optional<std::filesystem::path> checkpoint_path;
    if (!report_checkpoint->empty()) {
      checkpoint_path = *report_checkpoint;
      if (std::filesystem::exists(*checkpoint_path))
        resume = load_checkpoint(*checkpoint_path);
    }
    const CountResult counts =
        count_at_checkpoints(form, decades, resume, options, checkpoint_path);

    const SingularConstant constant =
        resolve_constant(form, *report_constant, *report_cutoff);
    std::vector<ReportRow> rows;
    if (*report_method == "sum") {
      std::vector<uint64_t> limits;
      for (const CountRow& row : counts.rows) limits.push_back(row.m_limit);
      const std::vector<EstimateRow> estimates =
          estimate_sum_rows(form, constant, limits);
      for (size_t i = 0; i < counts.rows.size(); ++i)
        rows.push_back(
            {counts.rows[i].m_limit, estimates[i].rounded, counts.rows[i].count});
    } else {
      for (const CountRow& row : counts.rows)
        rows.push_back({row.m_limit,
                        estimate_by_integral(form, constant, row.m_limit).rounded,
                        row.count});
    }
    std::cout << (*report_format == "table" ? render_table(rows) : render_csv(rows));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n"
              << "run with --help for usage\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
