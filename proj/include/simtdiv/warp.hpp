#pragma once

// 32-lane warp executing a Program under the branch-synchronization-stack
// divergence model: SSY pushes a SYNC token, a partially taken predicated
// branch pushes a DIV token for the lanes that fall through, and an
// instruction carrying the pop-bit unwinds one token before it executes.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simtdiv/cost_model.hpp"
#include "simtdiv/isa.hpp"
#include "simtdiv/sync_stack.hpp"

namespace simtdiv {

inline constexpr std::uint64_t kDefaultInstructionBudget = 10'000'000;

struct LaunchConfig {
  /// Register name (`R5`, `RZ` excluded, or a program alias) to 32
  /// per-lane values. Unlisted registers start at zero.
  std::map<std::string, std::vector<std::int32_t>> registers;
  LaneMask launch_mask = kFullMask;
  ArchProfile profile = ArchProfile::kepler();
  std::uint64_t instruction_budget = kDefaultInstructionBudget;
  bool record_trace = false;
};

struct Counters {
  EventCounts events;
  std::uint64_t executed_instructions = 0;
  std::uint64_t executed_branches = 0;

  std::uint64_t sync_pushes() const { return events.sync_pushes; }
  std::uint64_t div_pushes() const { return events.div_pushes; }
  std::uint64_t pushes() const { return events.pushes(); }
  std::uint64_t pops() const { return events.pops(); }
  std::uint64_t spill_stores() const { return events.spill_stores; }
  std::uint64_t spill_loads() const { return events.spill_loads; }
};

/// Stack depth after `ordinal` instructions have executed.
struct DepthSample {
  std::uint64_t ordinal = 0;
  std::size_t depth = 0;

  friend bool operator==(const DepthSample&, const DepthSample&) = default;
};

/// One executed instruction. `token` is the token pushed or popped, if any.
struct StepRecord {
  std::uint64_t ordinal = 0;  // 1-based
  Address pc = 0;
  OpKind kind = OpKind::kNop;
  bool pop_bit = false;
  LaneMask mask_before = 0;
  LaneMask mask_after = 0;
  std::size_t depth_after = 0;
  StepEvents events;
  std::optional<Token> token;
  std::uint64_t cycle_after = 0;
};

struct RunResult {
  Counters counters;
  /// Starts with {0, 0}; one sample per depth change.
  std::vector<DepthSample> depth_history;
  std::size_t max_depth = 0;
  std::uint64_t total_cycles = 0;
  LaneMask final_mask = 0;
  /// registers[lane][index], raw 32-bit contents.
  std::vector<std::vector<std::uint32_t>> registers;
  /// slots[lane][slot] written by STORE_SLOT.
  std::vector<std::map<std::int32_t, std::uint32_t>> slots;
  /// Filled only when LaunchConfig::record_trace is set.
  std::vector<StepRecord> trace;

  std::int32_t int_reg(unsigned lane, Reg reg) const;
  float float_reg(unsigned lane, Reg reg) const;
};

/// Mutable state of one warp. Not shared between simulations.
class WarpState {
 public:
  WarpState(const ArchProfile& profile, LaneMask launch_mask,
            unsigned num_registers = Program::kDefaultRegisters,
            unsigned num_predicates = Program::kDefaultPredicates);

  Address pc() const { return pc_; }
  void set_pc(Address pc) { pc_ = pc; }
  LaneMask active_mask() const { return active_; }
  void set_active_mask(LaneMask mask) { active_ = mask; }
  LaneMask launch_mask() const { return launch_mask_; }
  const SyncStack& stack() const { return stack_; }
  std::uint64_t cycle() const { return cycle_; }
  const Counters& counters() const { return counters_; }
  bool exited() const { return exited_; }

  std::uint32_t reg(unsigned lane, Reg r) const;
  void set_reg(unsigned lane, Reg r, std::uint32_t value);
  bool pred(unsigned lane, Pred p) const;
  void set_pred(unsigned lane, Pred p, bool value);
  const std::map<std::int32_t, std::uint32_t>& slots(unsigned lane) const {
    return slots_[lane];
  }

  /// Predicated branch. `taken` holds the predicate of all 32 lanes; only
  /// active lanes are considered. Updates pc, mask and stack, and returns
  /// the emitted events. Does not advance the cycle counter.
  StepEvents branch(Address target, LaneMask taken);

  /// Executes the instruction at pc(). Throws ModelError on a pop from an
  /// empty stack, a pc outside the program, or an EXIT without full
  /// re-convergence.
  StepRecord step(const Program& program);

 private:
  void execute(const Instruction& ins);

  ArchProfile profile_;
  LaneMask launch_mask_;
  unsigned num_registers_;
  unsigned num_predicates_;
  Address pc_ = 0;
  LaneMask active_;
  SyncStack stack_;
  std::uint64_t cycle_ = 0;
  Counters counters_;
  bool exited_ = false;
  std::vector<std::vector<std::uint32_t>> regs_;  // [lane][index]
  std::vector<std::vector<bool>> preds_;          // [lane][index]
  std::vector<std::map<std::int32_t, std::uint32_t>> slots_;
};

/// Runs `program` from pc 0 until EXIT. Deterministic: identical inputs give
/// identical results. Throws ConfigError for a bad launch, BudgetExceeded
/// when `instruction_budget` instructions execute without reaching EXIT,
/// and propagates ModelError from step().
RunResult run(const Program& program, const LaunchConfig& launch);

}  // namespace simtdiv
