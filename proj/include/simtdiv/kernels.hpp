#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "simtdiv/cost_model.hpp"
#include "simtdiv/isa.hpp"
#include "simtdiv/warp.hpp"

namespace simtdiv {

enum class KernelId : std::uint8_t {
  kSingleLoop,
  kDoubleLoop,
  kSingleLoopInstrumented,
};

/// `single`, `double`, `instrumented`; also the base_cycles key.
std::string_view kernel_name(KernelId id);
std::optional<KernelId> parse_kernel_id(std::string_view name);

inline constexpr int kMaxDivergent = 31;

/// Per-lane loop limits for `n` divergent lanes: the first 32-n lanes keep
/// the full 32 iterations, the remaining lanes get 31, 30, ... down to 32-n.
struct BoundPattern {
  int n = 0;
  std::array<std::int32_t, kWarpSize> bounds{};
};

/// Throws ConfigError unless 0 <= n <= 31.
BoundPattern bound_pattern(int n);

// Register conventions of the built-in kernels. Loop limits are read from
// the alias `M` (and `N` for the inner loop of the double loop); the float
// accumulator is R0.
inline constexpr Reg kAccumulator{0};

/// Guard, SSY, guarded branch past the loop, body {IADD i, FADD32I acc,
/// ISETP i<M, @P0 BRA body}, NOP.S at the sync point, CLOCK on both sides.
Program single_loop_program();
/// Two nested single loops; the inner SSY is re-issued every outer
/// iteration, the outer body adds 2.3333 after the inner loop.
Program double_loop_program();
/// Single loop storing a timestamp into slot i on iteration i (1-based)
/// and a post-unwind timestamp into slot 0.
Program instrumented_single_loop_program();

const Program& kernel_program(KernelId id);

/// Loop-counter register of the single-loop kernels (holds M on exit).
inline constexpr Reg kLoopCounter{4};
inline constexpr float kInnerIncrement = 1.3333f;
inline constexpr float kOuterIncrement = 2.3333f;
inline constexpr std::int32_t kPostLoopSlot = 0;

/// Launch with every loop limit of `id` set from `pattern`.
LaunchConfig kernel_launch(KernelId id, const BoundPattern& pattern,
                           ArchProfile profile = ArchProfile::kepler());

/// base_cycles[kernel_name(id)] + charge(result). Throws ConfigError when
/// the profile has no base for the kernel.
std::uint64_t predict_total(KernelId id, const ArchProfile& profile,
                            const RunResult& result);

}  // namespace simtdiv
