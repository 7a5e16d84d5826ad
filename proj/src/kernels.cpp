#include "simtdiv/kernels.hpp"

#include <string>
#include <vector>

#include "simtdiv/error.hpp"

namespace simtdiv {

std::string_view kernel_name(KernelId id) {
  switch (id) {
    case KernelId::kSingleLoop: return "single";
    case KernelId::kDoubleLoop: return "double";
    case KernelId::kSingleLoopInstrumented: return "instrumented";
  }
  return "?";
}

std::optional<KernelId> parse_kernel_id(std::string_view name) {
  for (KernelId id : {KernelId::kSingleLoop, KernelId::kDoubleLoop,
                      KernelId::kSingleLoopInstrumented}) {
    if (kernel_name(id) == name) return id;
  }
  return std::nullopt;
}

BoundPattern bound_pattern(int n) {
  if (n < 0 || n > kMaxDivergent) {
    throw ConfigError("divergent-thread count n=" + std::to_string(n) +
                      " outside 0..31");
  }
  BoundPattern p;
  p.n = n;
  for (int tid = 0; tid < static_cast<int>(kWarpSize); ++tid) {
    p.bounds[tid] = tid <= 31 - n ? 32 : 63 - n - tid;
  }
  return p;
}

Program single_loop_program() {
  constexpr Reg acc = kAccumulator, i = kLoopCounter, m{5}, t0{6}, t1{7};
  constexpr Pred p0{0};
  return ProgramBuilder()
      .alias("M", m)
      .isetp_lt(p0, m, 1)
      .mov(i, Reg::zero())
      .clock(t0)
      .ssy("done")
      .bra("sync", p0)
      .nop()
      .nop()
      .label("loop")
      .iadd(i, i, 1)
      .fadd_imm(acc, acc, kInnerIncrement)
      .isetp_lt(p0, i, m)
      .bra("loop", p0)
      .label("sync")
      .nop(true)
      .label("done")
      .clock(t1)
      .exit()
      .build();
}

Program double_loop_program() {
  constexpr Reg acc = kAccumulator, outer{6}, inner{7}, m{8}, n{9}, t0{10}, t1{11};
  constexpr Pred p0{0};
  return ProgramBuilder()
      .alias("M", m)
      .alias("N", n)
      .isetp_lt(p0, m, 1)
      .clock(t0)
      .ssy("outer_done")
      .bra("outer_sync", p0)
      .mov(outer, Reg::zero())
      .label("outer")
      .isetp_lt(p0, n, 1)
      .mov(inner, Reg::zero())
      .ssy("inner_done")
      .bra("inner_sync", p0)
      .label("inner")
      .iadd(inner, inner, 1)
      .fadd_imm(acc, acc, kInnerIncrement)
      .isetp_lt(p0, inner, n)
      .bra("inner", p0)
      .label("inner_sync")
      .nop(true)
      .label("inner_done")
      .iadd(outer, outer, 1)
      .fadd_imm(acc, acc, kOuterIncrement)
      .isetp_lt(p0, outer, m)
      .bra("outer", p0)
      .label("outer_sync")
      .nop(true)
      .label("outer_done")
      .clock(t1)
      .exit()
      .build();
}

Program instrumented_single_loop_program() {
  constexpr Reg acc = kAccumulator, i = kLoopCounter, m{5}, stamp{6}, t1{7};
  constexpr Pred p0{0};
  return ProgramBuilder()
      .alias("M", m)
      .isetp_lt(p0, m, 1)
      .mov(i, Reg::zero())
      .ssy("done")
      .bra("sync", p0)
      .label("loop")
      .iadd(i, i, 1)
      .fadd_imm(acc, acc, kInnerIncrement)
      .clock(stamp)
      .store_slot(i, stamp)
      .isetp_lt(p0, i, m)
      .bra("loop", p0)
      .label("sync")
      .nop(true)
      .label("done")
      .clock(t1)
      .store_slot(kPostLoopSlot, t1)
      .exit()
      .build();
}

const Program& kernel_program(KernelId id) {
  static const Program single = single_loop_program();
  static const Program dbl = double_loop_program();
  static const Program instrumented = instrumented_single_loop_program();
  switch (id) {
    case KernelId::kSingleLoop: return single;
    case KernelId::kDoubleLoop: return dbl;
    case KernelId::kSingleLoopInstrumented: return instrumented;
  }
  throw ConfigError("unknown kernel id");
}

LaunchConfig kernel_launch(KernelId id, const BoundPattern& pattern,
                           ArchProfile profile) {
  LaunchConfig launch;
  launch.profile = std::move(profile);
  std::vector<std::int32_t> bounds(pattern.bounds.begin(), pattern.bounds.end());
  launch.registers["M"] = bounds;
  if (id == KernelId::kDoubleLoop) launch.registers["N"] = bounds;
  return launch;
}

std::uint64_t predict_total(KernelId id, const ArchProfile& profile,
                            const RunResult& result) {
  return predict_total(kernel_name(id), profile, result.counters.events);
}

}  // namespace simtdiv
