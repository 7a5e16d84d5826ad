#include <doctest.h>

#include <random>
#include <vector>

#include "oracle.hpp"
#include "simtdiv/error.hpp"
#include "simtdiv/kernels.hpp"
#include "simtdiv/warp.hpp"

using namespace simtdiv;

namespace {

std::vector<std::size_t> depths(const RunResult& r) {
  std::vector<std::size_t> out;
  for (const DepthSample& s : r.depth_history) out.push_back(s.depth);
  return out;
}

// 0: NOP   1: NOP.S   2: NOP   3: EXIT
Program carrier_program() {
  return ProgramBuilder().nop().nop(true).nop().exit().build();
}

}  // namespace

TEST_CASE("branch: no active lane takes it") {
  WarpState w(ArchProfile::kepler(), kFullMask);
  w.set_pc(10);
  const StepEvents ev = w.branch(3, 0x00000000);
  CHECK(ev.empty());
  CHECK(w.pc() == 11);
  CHECK(w.active_mask() == kFullMask);
  CHECK(w.stack().empty());
}

TEST_CASE("branch: every active lane takes it") {
  WarpState w(ArchProfile::kepler(), kFullMask);
  w.set_pc(10);
  w.set_active_mask(0x0000FFFF);
  // inactive lanes' predicates are ignored
  const StepEvents ev = w.branch(3, 0x0F0FFFFF);
  CHECK(ev.empty());
  CHECK(w.pc() == 3);
  CHECK(w.active_mask() == 0x0000FFFF);
  CHECK(w.stack().empty());
}

TEST_CASE("branch: partial predicate pushes a DIV token") {
  WarpState w(ArchProfile::kepler(), kFullMask);
  w.set_pc(10);
  StepEvents ev = w.branch(7, 0x7FFFFFFF);
  CHECK(ev.contains(CostEvent::kDivPush));
  CHECK(w.stack().top() == Token{0x80000000, TokenId::kDiv, 11});
  CHECK(w.active_mask() == 0x7FFFFFFF);
  CHECK(w.pc() == 7);

  w.set_pc(10);
  ev = w.branch(7, 0x3FFFFFFF);
  CHECK(ev.contains(CostEvent::kDivPush));
  CHECK(w.stack().top() == Token{0x40000000, TokenId::kDiv, 11});
  CHECK(w.active_mask() == 0x3FFFFFFF);
  CHECK(w.stack().depth() == 2);
}

TEST_CASE("branch partitions the active mask") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::uint32_t> d;
  for (int i = 0; i < 2000; ++i) {
    const LaneMask active = d(rng) | 1u;
    const LaneMask taken = d(rng);
    WarpState w(ArchProfile::kepler(), kFullMask);
    w.set_active_mask(active);
    w.branch(0, taken);
    if ((active & taken) != 0 && (active & taken) != active) {
      const Token t = *w.stack().top();
      CHECK((t.mask | w.active_mask()) == active);
      CHECK((t.mask & w.active_mask()) == 0);
      CHECK(t.mask != 0);
    } else {
      CHECK(w.stack().empty());
      CHECK(w.active_mask() == active);
    }
  }
}

TEST_CASE("step: SSY pushes the active mask and its target") {
  const Program p = ProgramBuilder().ssy("done").nop().label("done").exit().build();
  WarpState w(ArchProfile::kepler(), kFullMask);
  const StepRecord rec = w.step(p);
  CHECK(w.stack().depth() == 1);
  CHECK(w.stack().top() == Token{kFullMask, TokenId::kSync, 2});
  CHECK(rec.events.contains(CostEvent::kSyncPush));
  CHECK(w.pc() == 1);
}

TEST_CASE("step: pop-bit carrier unwinds a DIV token pointing at itself") {
  const Program p = carrier_program();
  WarpState w(ArchProfile::kepler(), kFullMask);
  w.set_pc(0);
  w.branch(1, 0xBFFFFFFF);  // DIV{0x40000000, pc=1}
  REQUIRE(w.stack().top() == Token{0x40000000, TokenId::kDiv, 1});
  const std::size_t before = w.stack().depth();
  const StepRecord rec = w.step(p);
  CHECK(w.active_mask() == 0x40000000);
  CHECK(w.pc() == 1);
  CHECK(w.stack().depth() == before - 1);
  CHECK(rec.events.contains(CostEvent::kDivPop));
  CHECK(rec.kind == OpKind::kNop);
  CHECK(rec.pop_bit);
}

TEST_CASE("step: pop-bit carrier restores the SYNC mask") {
  const Program p = ProgramBuilder()
                        .ssy("after")
                        .label("carrier").nop(true)
                        .nop()
                        .label("after").exit()
                        .build();
  WarpState w(ArchProfile::kepler(), kFullMask);
  w.step(p);  // SSY
  w.set_active_mask(0x00000001);
  const StepRecord rec = w.step(p);
  CHECK(w.active_mask() == kFullMask);
  CHECK(w.pc() == 3);
  CHECK(w.stack().empty());
  CHECK(rec.events.contains(CostEvent::kSyncPop));
}

TEST_CASE("step: non-NOP carrier executes with the restored mask") {
  const Program p = ProgramBuilder()
                        .ssy("after")
                        .iadd(Reg{1}, Reg{1}, 5, true)
                        .label("after").exit()
                        .build();
  WarpState w(ArchProfile::kepler(), kFullMask);
  w.step(p);
  w.set_active_mask(0x1);
  w.step(p);
  CHECK(w.active_mask() == kFullMask);
  for (unsigned lane = 0; lane < kWarpSize; ++lane) CHECK(w.reg(lane, Reg{1}) == 5);
  CHECK(w.pc() == 2);
}

TEST_CASE("step errors") {
  const Program p = carrier_program();
  WarpState w(ArchProfile::kepler(), kFullMask);
  w.set_pc(1);
  CHECK_THROWS_AS(w.step(p), ModelError);

  WarpState far(ArchProfile::kepler(), kFullMask);
  far.set_pc(99);
  CHECK_THROWS_AS(far.step(p), ModelError);

  const Program unbalanced = ProgramBuilder().ssy("end").label("end").exit().build();
  CHECK_THROWS_AS(run(unbalanced, LaunchConfig{}), ModelError);

  const Program pops_empty = ProgramBuilder().nop(true).exit().build();
  CHECK_THROWS_AS(run(pops_empty, LaunchConfig{}), ModelError);
}

TEST_CASE("EXIT with a partial mask is a model error") {
  // Lanes with R1 < 1 branch straight to EXIT with no SSY to re-converge.
  const Program p = ProgramBuilder()
                        .isetp_lt(Pred{0}, Reg{1}, 1)
                        .bra("out", Pred{0})
                        .nop(true)
                        .label("out").exit()
                        .build();
  LaunchConfig launch;
  launch.registers["R1"] = std::vector<std::int32_t>(32, 1);
  launch.registers["R1"][3] = 0;
  CHECK_THROWS_AS(run(p, launch), ModelError);
}

TEST_CASE("instruction budget") {
  const Program spin = ProgramBuilder().label("top").bra("top").exit().build();
  LaunchConfig launch;
  launch.instruction_budget = 1000;
  CHECK_THROWS_AS(run(spin, launch), BudgetExceeded);

  const Program& single = kernel_program(KernelId::kSingleLoop);
  LaunchConfig tight = kernel_launch(KernelId::kSingleLoop, bound_pattern(0));
  const auto needed = run(single, tight).counters.executed_instructions;
  tight.instruction_budget = needed;
  CHECK_NOTHROW(run(single, tight));
  tight.instruction_budget = needed - 1;
  CHECK_THROWS_AS(run(single, tight), BudgetExceeded);
}

TEST_CASE("launch validation") {
  const Program& p = kernel_program(KernelId::kSingleLoop);
  LaunchConfig launch;
  launch.registers["M"] = std::vector<std::int32_t>(31, 1);
  CHECK_THROWS_AS(run(p, launch), ConfigError);
  launch.registers.clear();
  launch.registers["RZ"] = std::vector<std::int32_t>(32, 1);
  CHECK_THROWS_AS(run(p, launch), ConfigError);
  launch.registers.clear();
  launch.registers["Q7"] = std::vector<std::int32_t>(32, 1);
  CHECK_THROWS_AS(run(p, launch), ConfigError);
  launch.registers.clear();
  launch.launch_mask = 0;
  CHECK_THROWS_AS(run(p, launch), ConfigError);
  LaunchConfig bad_profile;
  bad_profile.profile.spill_chunk = 0;
  CHECK_THROWS_AS(run(p, bad_profile), ConfigError);
}

TEST_CASE("walk-through at n=2") {
  const RunResult r = oracle::checked_run(kernel_program(KernelId::kSingleLoop),
                                          kernel_launch(KernelId::kSingleLoop, bound_pattern(2)));
  CHECK(depths(r) == std::vector<std::size_t>{0, 1, 2, 3, 2, 1, 0});
  std::vector<Token> pushed, popped;
  for (const StepRecord& rec : r.trace) {
    if (!rec.token) continue;
    const bool push = rec.events.contains(CostEvent::kSyncPush) ||
                      rec.events.contains(CostEvent::kDivPush);
    (push ? pushed : popped).push_back(*rec.token);
  }
  REQUIRE(pushed.size() == 3);
  REQUIRE(popped.size() == 3);
  CHECK(pushed[0].id == TokenId::kSync);
  CHECK(pushed[0].mask == 0xFFFFFFFF);
  CHECK(pushed[1] == Token{0x80000000, TokenId::kDiv, pushed[1].pc});
  CHECK(pushed[2] == Token{0x40000000, TokenId::kDiv, pushed[2].pc});
  CHECK(popped[0].mask == 0x40000000);
  CHECK(popped[1].mask == 0x80000000);
  CHECK(popped[2].mask == 0xFFFFFFFF);
  CHECK(r.final_mask == kFullMask);
}

TEST_CASE("single loop at n=0") {
  const RunResult r = oracle::checked_run(kernel_program(KernelId::kSingleLoop),
                                          kernel_launch(KernelId::kSingleLoop, bound_pattern(0)));
  CHECK(r.counters.div_pushes() == 0);
  CHECK(r.counters.sync_pushes() == 1);
  CHECK(r.counters.pops() == 1);
  CHECK(r.max_depth == 1);
}

TEST_CASE("accumulator counts each lane's iterations") {
  const Program& p = kernel_program(KernelId::kSingleLoop);
  std::mt19937 rng(99);
  for (int round = 0; round < 50; ++round) {
    LaunchConfig launch;
    launch.registers["M"] = oracle::random_bounds(rng);
    const RunResult r = oracle::checked_run(p, launch);
    for (unsigned lane = 0; lane < kWarpSize; ++lane) {
      const auto m = launch.registers["M"][lane];
      float expect = 0.0f;
      for (int i = 0; i < m; ++i) expect += kInnerIncrement;
      CHECK(r.int_reg(lane, kLoopCounter) == m);
      CHECK(r.float_reg(lane, kAccumulator) == expect);
    }
  }
}

TEST_CASE("inactive lanes are write-masked") {
  const Program& p = kernel_program(KernelId::kSingleLoop);
  LaunchConfig launch = kernel_launch(KernelId::kSingleLoop, bound_pattern(0));
  launch.launch_mask = 0x0000FFFF;
  const RunResult r = oracle::checked_run(p, launch);
  CHECK(r.final_mask == 0x0000FFFF);
  for (unsigned lane = 0; lane < kWarpSize; ++lane) {
    CHECK(r.int_reg(lane, kLoopCounter) == (lane < 16 ? 32 : 0));
  }
}

TEST_CASE("runs are deterministic") {
  const Program& p = kernel_program(KernelId::kDoubleLoop);
  LaunchConfig launch = kernel_launch(KernelId::kDoubleLoop, bound_pattern(19));
  launch.record_trace = true;
  const RunResult a = run(p, launch);
  const RunResult b = run(p, launch);
  CHECK(a.counters.events == b.counters.events);
  CHECK(a.depth_history == b.depth_history);
  CHECK(a.registers == b.registers);
  CHECK(a.total_cycles == b.total_cycles);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].cycle_after == b.trace[i].cycle_after);
    CHECK(a.trace[i].mask_after == b.trace[i].mask_after);
  }
}

TEST_CASE("CLOCK reads the cycle counter before its own issue") {
  const Program p = ProgramBuilder().nop().nop().clock(Reg{3}).exit().build();
  const RunResult r = run(p, LaunchConfig{});
  CHECK(r.int_reg(0, Reg{3}) == 2);
  CHECK(r.total_cycles == 4);
}

TEST_CASE("DIV pop carriers cost div_cost instead of an issue slot") {
  const Program& p = kernel_program(KernelId::kSingleLoop);
  auto total = [&](int n) {
    return run(p, kernel_launch(KernelId::kSingleLoop, bound_pattern(n))).total_cycles;
  };
  const std::uint64_t base = total(0);
  for (int n = 1; n <= 15; ++n) CHECK(total(n) - base == 32u * n);
}
