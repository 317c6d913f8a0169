#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "carmsieve/forms.hpp"
#include "carmsieve/korselt.hpp"
#include "carmsieve/primality.hpp"

namespace carmsieve {

struct CandidateHit {
  uint64_t m = 0;
  std::vector<BigInt> factor_values;
  BigInt product;
  CarmichaelCertificate certificate;
  bool certified = false;      // Korselt accepted (always true for verified forms)
  bool probabilistic = false;  // some factor tested probabilistically
};

struct SearchOptions {
  unsigned threads = 1;
  uint64_t chunk_size = 1ull << 20;
  bool force_unverified = false;
  std::optional<ResidueWheel> wheel;  // nullopt = test every M
  unsigned probable_rounds = 64;      // rounds for factors >= 2^63

  // Called after each chunk, in ascending chunk order: last M fully scanned
  // and all hit Ms found so far.
  std::function<void(uint64_t last_m, const std::vector<uint64_t>& hit_ms)> on_chunk;
};

// {3, 7, 11, 13} minus the primes that divide every s*alpha_i (those exclude
// nothing and would only inflate the wheel modulus).
std::vector<uint64_t> default_wheel_primes(const UniversalForm& form);

// All M in [m_lo, m_hi] whose factor values are simultaneously prime, in
// ascending order, each with its Korselt certificate. Deterministic for any
// thread count. Refuses forms that fail verify_universal unless
// force_unverified is set.
std::vector<CandidateHit> search_range(const UniversalForm& form, uint64_t m_lo,
                                       uint64_t m_hi, const SearchOptions& options = {});

struct SearchCheckpoint {
  std::string form_line;
  uint64_t last_m = 0;
  std::vector<uint64_t> hits;  // ascending

  friend bool operator==(const SearchCheckpoint&, const SearchCheckpoint&) = default;
};

// Line-oriented text: "version 1", the serialized form, "scanned <M>", then
// one "hit <M>" per hit. Written atomically (temp file + rename).
void save_checkpoint(const SearchCheckpoint& cp, const std::filesystem::path& path);
SearchCheckpoint load_checkpoint(const std::filesystem::path& path);

struct CountRow {
  uint64_t m_limit = 0;
  uint64_t count = 0;
};

struct CountResult {
  std::vector<CountRow> rows;
  SearchCheckpoint checkpoint;
};

// Cumulative hit counts at M = 10^d for each requested decade, scanning
// [1, 10^max] (or resuming from a prior checkpoint of the same form). When a
// path is given the checkpoint is rewritten after every chunk, so a crash
// loses at most one chunk of work.
CountResult count_at_checkpoints(
    const UniversalForm& form, const std::vector<unsigned>& decades,
    const std::optional<SearchCheckpoint>& resume = std::nullopt,
    const SearchOptions& options = {},
    const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

}  // namespace carmsieve
