#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rxl/likelihood.hpp"
#include "rxl/types.hpp"

namespace rxl {

// Per-data-configuration maximum likelihood over the whole theta lattice,
// with the attaining theta set. The multi-minute artifact: built once per
// (s, spec), persisted, and shared by every test and interval query.
struct LambdaTable {
  int s = 0;
  RandomizationSpec spec = RandomizationSpec::iid(Rational(1, 2));
  bool exact_ties = false;  // argmax sets certified by big-integer comparison

  // Indexed by canonical data-configuration rank.
  std::vector<double> log_max;          // log-zero where no theta is feasible
  std::vector<std::uint32_t> argmax_count;
  std::vector<std::uint64_t> argmax_offset;  // into argmax_ranks
  std::vector<std::uint32_t> argmax_ranks;   // type-config ranks, ascending per entry

  // Optional per-hypothesis numerator overlay: max log likelihood over the
  // null members. In-memory only; the cache file persists the denominator.
  std::string overlay_h0;
  std::vector<double> log_max_null;

  std::int64_t size() const { return static_cast<std::int64_t>(log_max.size()); }
  std::int64_t multi_valued_count() const;
  std::vector<TypeConfig> argmax_configs(std::int64_t g_rank) const;
};

// Parallel builder. Feasibility-pruned over theta, deterministic for any
// thread count. exact_ties defaults to on for s <= 512.
LambdaTable build_lambda_table(int s, const RandomizationSpec& spec,
                               int threads = 0, int exact_ties = -1);

// Straightforward single-threaded reference: full lattice scan per g, naive
// ell range, log-sum-exp of pmf products, exact-rational tie comparison.
// Kept for tests and benchmarking against the parallel kernel.
LambdaTable build_lambda_table_serial(int s, const RandomizationSpec& spec);

bool tables_equal(const LambdaTable& a, const LambdaTable& b, double log_tol);

// Binary cache. Little-endian; header carries the exact spec parameters and
// a checksum over the payload. Truncated or mismatched files are rejected.
void save_lambda_table(const LambdaTable& table, const std::filesystem::path& path);
LambdaTable load_lambda_table(const std::filesystem::path& path);

// Serialized image of the table (the save/load byte stream).
std::vector<std::uint8_t> serialize_lambda_table(const LambdaTable& table);

}  // namespace rxl
