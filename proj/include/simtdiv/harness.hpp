#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simtdiv/cost_model.hpp"
#include "simtdiv/kernels.hpp"
#include "simtdiv/warp.hpp"

namespace simtdiv {

/// Inclusive range of divergent-thread counts.
struct NRange {
  int first = 0;
  int last = kMaxDivergent;

  std::size_t size() const { return static_cast<std::size_t>(last - first + 1); }
  friend bool operator==(const NRange&, const NRange&) = default;
};

/// Parses `A..B` or a single `A`. Throws ConfigError unless 0 <= A <= B <= 31.
NRange parse_n_range(std::string_view text);
void validate(const NRange& range);

struct SweepRow {
  int n = 0;
  KernelId kernel = KernelId::kSingleLoop;
  std::string arch;
  std::uint64_t div_pushes = 0;
  std::uint64_t total_pushes = 0;
  std::uint64_t div_pops = 0;
  std::size_t max_depth = 0;
  std::uint64_t spill_stores = 0;
  std::uint64_t spill_loads = 0;
  /// Additional branch issues attributed to spills; equals spill_stores.
  std::uint64_t extra_branches = 0;
  std::uint64_t overhead_cycles = 0;
  /// base + overhead when the profile has a base for the kernel, otherwise
  /// the overhead alone (`base_known` false).
  std::uint64_t predicted_cycles = 0;
  bool base_known = false;
  std::optional<std::int64_t> oracle_cycles;
  std::optional<std::uint64_t> abs_diff;
};

/// One row per n (ordered by n), each from bound_pattern -> run -> predict.
/// Values of n run concurrently.
std::vector<SweepRow> sweep(KernelId kernel, const ArchProfile& profile,
                            NRange range = {});

// Closed-form oracles, exact integer arithmetic. All throw ConfigError for n
// outside 0..31.
std::uint64_t expected_push_count(KernelId kernel, int n);
std::size_t expected_max_depth(KernelId kernel, int n);
/// Published timing fit; present for the Kepler single and double loops only.
std::optional<std::int64_t> fit_curve(KernelId kernel, std::string_view arch, int n);

struct OracleRow {
  int n = 0;
  std::uint64_t push_count = 0;
  std::size_t max_depth = 0;
  std::optional<std::int64_t> fit_cycles;
};

struct OracleSet {
  KernelId kernel = KernelId::kSingleLoop;
  std::string arch;
  NRange range;
  std::vector<OracleRow> rows;

  static OracleSet build(KernelId kernel, std::string_view arch, NRange range = {});
};

struct ComparedRow {
  int n = 0;
  bool spill_region = false;
  std::uint64_t total_pushes = 0;
  std::uint64_t expected_pushes = 0;
  std::size_t max_depth = 0;
  std::size_t expected_max_depth = 0;
  std::uint64_t predicted_cycles = 0;
  std::optional<std::int64_t> oracle_cycles;
  std::optional<std::uint64_t> abs_diff;
};

/// Pass requires exact push counts and max depths on every row, and a zero
/// cycle diff on every no-spill row that has a fit. Spill-region diffs are
/// reported, not asserted.
struct CompareReport {
  KernelId kernel = KernelId::kSingleLoop;
  std::string arch;
  NRange range;
  std::vector<ComparedRow> rows;
  std::uint64_t max_abs_diff = 0;
  std::uint64_t max_abs_diff_exact_region = 0;
  double max_rel_diff = 0.0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
  std::string to_text() const;
};

/// Throws ConfigError when rows and oracles cover different n.
CompareReport compare(std::span<const SweepRow> rows, const OracleSet& oracles);

enum class OutputFormat { kCsv, kJsonl };

std::optional<OutputFormat> parse_output_format(std::string_view name);

/// Header: n,kernel,arch,div_pushes,total_pushes,max_depth,spills,
/// extra_branches,predicted_cycles,oracle_cycles,diff
void write_rows(std::ostream& out, std::span<const SweepRow> rows, OutputFormat format);

/// One record per executed instruction: ordinal, pc, opcode, active_mask
/// (after the step, hex), depth (after the step), event (`+`-joined, empty
/// when none), cycle (after the step). Requires a run with record_trace.
/// Throws Error when the sink fails.
void emit_trace(const RunResult& result, std::ostream& out, OutputFormat format);

}  // namespace simtdiv
