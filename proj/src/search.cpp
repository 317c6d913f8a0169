#include "carmsieve/search.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace carmsieve {

namespace {

struct ScanContext {
  const UniversalForm* form = nullptr;
  std::vector<uint64_t> slopes;  // s * alpha_i, ascending
  std::vector<int64_t> betas;
  const ResidueWheel* wheel = nullptr;
  unsigned probable_rounds = 64;
};

bool test_candidate(const ScanContext& ctx, uint64_t m, CandidateHit& hit) {
  bool probabilistic = false;
  for (size_t i = 0; i < ctx.slopes.size(); ++i) {
    const unsigned __int128 raw =
        static_cast<unsigned __int128>(ctx.slopes[i]) * m;
    const __int128 value = static_cast<__int128>(raw) + ctx.betas[i];
    if (value < 2) return false;
    if (static_cast<unsigned __int128>(value) >> 63 == 0) {
      if (!is_prime_64(static_cast<uint64_t>(value))) return false;
    } else {
      BigInt big = BigInt(ctx.slopes[i]) * m + ctx.betas[i];
      if (!is_probable_prime_big(big, ctx.probable_rounds)) return false;
      probabilistic = true;
    }
  }

  Evaluation eval = evaluate(*ctx.form, m);
  KorseltResult korselt = korselt_check(eval.product, eval.factor_values);
  hit.m = m;
  hit.factor_values = std::move(eval.factor_values);
  hit.product = std::move(eval.product);
  hit.certified = korselt.accepted;
  hit.certificate = std::move(korselt.certificate);
  hit.probabilistic = probabilistic;
  return true;
}

std::vector<CandidateHit> scan_chunk(const ScanContext& ctx, uint64_t lo, uint64_t hi) {
  std::vector<CandidateHit> hits;
  CandidateHit hit;
  if (ctx.wheel == nullptr || ctx.wheel->modulus <= 1) {
    for (uint64_t m = lo; m <= hi; ++m)
      if (test_candidate(ctx, m, hit)) hits.push_back(std::move(hit));
    return hits;
  }

  const ResidueWheel& wheel = *ctx.wheel;
  std::vector<uint64_t> candidates;
  for (const uint64_t residue : wheel.admissible) {
    // smallest m >= lo with m = residue (mod modulus)
    uint64_t m = lo + (residue + wheel.modulus - lo % wheel.modulus) % wheel.modulus;
    for (; m <= hi && m >= lo; m += wheel.modulus) candidates.push_back(m);
  }
  const auto first = std::lower_bound(wheel.exceptions.begin(), wheel.exceptions.end(), lo);
  const auto last = std::upper_bound(wheel.exceptions.begin(), wheel.exceptions.end(), hi);
  candidates.insert(candidates.end(), first, last);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (const uint64_t m : candidates)
    if (test_candidate(ctx, m, hit)) hits.push_back(std::move(hit));
  return hits;
}

void run_chunked(const ScanContext& ctx, uint64_t m_lo, uint64_t m_hi,
                 const SearchOptions& options,
                 const std::function<void(uint64_t, std::vector<CandidateHit>&&)>& consume) {
  const uint64_t chunk = std::max<uint64_t>(1, options.chunk_size);
  const unsigned threads = std::max(1u, options.threads);

  if (threads == 1) {
    for (uint64_t lo = m_lo; lo <= m_hi;) {
      const uint64_t hi = (m_hi - lo >= chunk - 1) ? lo + (chunk - 1) : m_hi;
      consume(hi, scan_chunk(ctx, lo, hi));
      if (hi == m_hi) break;
      lo = hi + 1;
    }
    return;
  }

  // Workers run ahead on later chunks while results are consumed strictly in
  // chunk order, so output and checkpoints are deterministic.
  std::deque<std::pair<uint64_t, std::future<std::vector<CandidateHit>>>> pending;
  uint64_t next_lo = m_lo;
  bool exhausted = false;
  const auto launch = [&] {
    if (exhausted) return;
    const uint64_t lo = next_lo;
    const uint64_t hi = (m_hi - lo >= chunk - 1) ? lo + (chunk - 1) : m_hi;
    pending.emplace_back(hi, std::async(std::launch::async, [&ctx, lo, hi] {
                           return scan_chunk(ctx, lo, hi);
                         }));
    if (hi == m_hi)
      exhausted = true;
    else
      next_lo = hi + 1;
  };

  for (unsigned i = 0; i < threads && !exhausted; ++i) launch();
  if (!pending.empty() && !exhausted) launch();  // keep one extra in flight
  while (!pending.empty()) {
    auto [hi, future] = std::move(pending.front());
    pending.pop_front();
    std::vector<CandidateHit> hits = future.get();
    launch();
    consume(hi, std::move(hits));
  }
}

void require_verified(const UniversalForm& form, bool force) {
  if (force) return;
  const VerificationReport report = verify_universal(form);
  if (report.verified) return;
  std::string message = "search: form '" + form.serialize() + "' is not verified";
  if (report.inconclusive)
    message += " (verification inconclusive: modulus above enumeration bound)";
  else
    message += " (counterexample M = " + std::to_string(report.smallest_counterexample) + ")";
  message += "; pass force to search anyway";
  throw std::invalid_argument(message);
}

}  // namespace

std::vector<uint64_t> default_wheel_primes(const UniversalForm& form) {
  std::vector<uint64_t> primes;
  for (const uint64_t p : {3ull, 7ull, 11ull, 13ull}) {
    bool divides_all = true;
    for (const uint64_t sa : form.substituted_alphas())
      if (sa % p != 0) {
        divides_all = false;
        break;
      }
    if (!divides_all) primes.push_back(p);
  }
  return primes;
}

std::vector<CandidateHit> search_range(const UniversalForm& form, uint64_t m_lo,
                                       uint64_t m_hi, const SearchOptions& options) {
  if (m_lo < 1 || m_lo > m_hi)
    throw std::invalid_argument("search_range: need 1 <= m_lo <= m_hi");
  require_verified(form, options.force_unverified);

  ScanContext ctx;
  ctx.form = &form;
  ctx.slopes = form.substituted_alphas();
  for (const LinearFactor& f : form.factors) ctx.betas.push_back(f.beta);
  ctx.wheel = options.wheel ? &*options.wheel : nullptr;
  ctx.probable_rounds = options.probable_rounds;

  std::vector<CandidateHit> hits;
  std::vector<uint64_t> hit_ms;
  run_chunked(ctx, m_lo, m_hi, options,
              [&](uint64_t last_m, std::vector<CandidateHit>&& chunk_hits) {
                for (CandidateHit& hit : chunk_hits) {
                  hit_ms.push_back(hit.m);
                  hits.push_back(std::move(hit));
                }
                if (options.on_chunk) options.on_chunk(last_m, hit_ms);
              });
  return hits;
}

void save_checkpoint(const SearchCheckpoint& cp, const std::filesystem::path& path) {
  const std::filesystem::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::trunc);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + temp.string());
    out << "version 1\n";
    out << cp.form_line << "\n";
    out << "scanned " << cp.last_m << "\n";
    for (const uint64_t m : cp.hits) out << "hit " << m << "\n";
    out.flush();
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

SearchCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());

  const auto fail = [&](size_t line_no, const std::string& why) {
    throw std::runtime_error("load_checkpoint: " + path.string() + " line " +
                             std::to_string(line_no) + ": " + why);
  };

  SearchCheckpoint cp;
  std::string line;
  size_t line_no = 0;

  if (!std::getline(in, line)) fail(1, "missing version header");
  ++line_no;
  if (line != "version 1") fail(line_no, "version mismatch, expected 'version 1'");

  if (!std::getline(in, line)) fail(2, "missing form line");
  ++line_no;
  try {
    UniversalForm::parse(line);  // validated here, reparsed by consumers
  } catch (const std::invalid_argument& e) {
    fail(line_no, e.what());
  }
  cp.form_line = line;

  if (!std::getline(in, line)) fail(3, "missing 'scanned' line");
  ++line_no;
  {
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword >> cp.last_m) || keyword != "scanned")
      fail(line_no, "expected 'scanned <M>'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    std::istringstream fields(line);
    std::string keyword;
    uint64_t m = 0;
    if (!(fields >> keyword >> m) || keyword != "hit") fail(line_no, "expected 'hit <M>'");
    if (!cp.hits.empty() && m <= cp.hits.back())
      fail(line_no, "hit values must be strictly ascending");
    if (m > cp.last_m) fail(line_no, "hit beyond the scanned bound");
    cp.hits.push_back(m);
  }
  return cp;
}

CountResult count_at_checkpoints(const UniversalForm& form,
                                 const std::vector<unsigned>& decades,
                                 const std::optional<SearchCheckpoint>& resume,
                                 const SearchOptions& options,
                                 const std::optional<std::filesystem::path>& checkpoint_path) {
  if (decades.empty()) throw std::invalid_argument("count_at_checkpoints: no decades");
  for (size_t i = 0; i < decades.size(); ++i) {
    if (decades[i] < 1 || decades[i] > 18)
      throw std::invalid_argument("count_at_checkpoints: decades must be in [1, 18]");
    if (i > 0 && decades[i] <= decades[i - 1])
      throw std::invalid_argument("count_at_checkpoints: decades must be ascending");
  }

  const std::string form_line = form.serialize();
  uint64_t start = 1;
  SearchCheckpoint cp;
  cp.form_line = form_line;
  if (resume) {
    if (resume->form_line != form_line)
      throw std::invalid_argument("count_at_checkpoints: checkpoint is for form '" +
                                  resume->form_line + "', not '" + form_line + "'");
    cp = *resume;
    start = resume->last_m + 1;
  }

  uint64_t m_hi = 1;
  for (unsigned d = 0; d < decades.back(); ++d) m_hi *= 10;

  if (start <= m_hi) {
    require_verified(form, options.force_unverified);
    ScanContext ctx;
    ctx.form = &form;
    ctx.slopes = form.substituted_alphas();
    for (const LinearFactor& f : form.factors) ctx.betas.push_back(f.beta);
    ctx.wheel = options.wheel ? &*options.wheel : nullptr;
    ctx.probable_rounds = options.probable_rounds;

    run_chunked(ctx, start, m_hi, options,
                [&](uint64_t last_m, std::vector<CandidateHit>&& chunk_hits) {
                  for (const CandidateHit& hit : chunk_hits) cp.hits.push_back(hit.m);
                  cp.last_m = last_m;
                  if (checkpoint_path) save_checkpoint(cp, *checkpoint_path);
                  if (options.on_chunk) options.on_chunk(last_m, cp.hits);
                });
  }
  if (cp.last_m < m_hi) cp.last_m = m_hi;

  CountResult result;
  result.checkpoint = std::move(cp);
  for (const unsigned d : decades) {
    uint64_t limit = 1;
    for (unsigned i = 0; i < d; ++i) limit *= 10;
    const auto end = std::upper_bound(result.checkpoint.hits.begin(),
                                      result.checkpoint.hits.end(), limit);
    result.rows.push_back(
        {limit, static_cast<uint64_t>(end - result.checkpoint.hits.begin())});
  }
  if (checkpoint_path) save_checkpoint(result.checkpoint, *checkpoint_path);
  return result;
}

}  // namespace carmsieve
