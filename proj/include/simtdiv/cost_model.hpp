#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "simtdiv/sync_stack.hpp"

namespace simtdiv {

/// Per-architecture cycle costs and stack geometry.
///
/// Divergence cost is attributed to pops: each DIV-token pop (together with
/// its carrier instruction) costs `div_cost`; pushes and SYNC pops are free
/// beyond ordinary issue and fold into the calibrated `base_cycles`.
struct ArchProfile {
  std::string name;
  std::uint64_t div_cost = 0;
  std::size_t phys_capacity = 16;
  std::size_t spill_chunk = 4;
  std::uint64_t spill_store_cost = 0;
  std::uint64_t spill_load_cost = 0;
  /// Emulator timeline cost of issuing one instruction that is not a
  /// DIV-pop carrier.
  std::uint64_t issue_cycles = 1;
  /// Calibrated whole-kernel constants keyed by kernel name.
  std::map<std::string, std::uint64_t> base_cycles;

  static ArchProfile kepler();
  static ArchProfile maxwell();

  bool unbounded_stack() const { return phys_capacity == kUnboundedCapacity; }
  std::optional<std::uint64_t> base_for(std::string_view kernel) const;
  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const ArchProfile&, const ArchProfile&) = default;
};

/// `kepler` or `maxwell`.
std::optional<ArchProfile> builtin_profile(std::string_view name);

/// Parses `key = value` lines (`#` comments). Keys: name, extends, div_cost,
/// phys_capacity (integer or `unbounded`), spill_chunk, spill_store_cost,
/// spill_load_cost, issue_cycles, base.<kernel>. `extends` must come first
/// and seeds every field from a built-in profile.
ArchProfile parse_profile(std::string_view text);
ArchProfile load_profile(const std::filesystem::path& path);
std::string format_profile(const ArchProfile& profile);

struct EventCounts {
  std::uint64_t sync_pushes = 0;
  std::uint64_t div_pushes = 0;
  std::uint64_t sync_pops = 0;
  std::uint64_t div_pops = 0;
  std::uint64_t spill_stores = 0;
  std::uint64_t spill_loads = 0;

  void add(CostEvent event);
  void add(std::span<const CostEvent> events);
  std::uint64_t pushes() const { return sync_pushes + div_pushes; }
  std::uint64_t pops() const { return sync_pops + div_pops; }

  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

std::uint64_t charge(const EventCounts& events, const ArchProfile& profile);
std::uint64_t charge(std::span<const CostEvent> events, const ArchProfile& profile);

/// base_cycles[kernel] + charge(events). Throws ConfigError when the profile
/// has no calibrated base for `kernel`.
std::uint64_t predict_total(std::string_view kernel, const ArchProfile& profile,
                            const EventCounts& events);

}  // namespace simtdiv
