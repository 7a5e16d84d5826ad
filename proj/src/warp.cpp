#include "simtdiv/warp.hpp"

#include <bit>
#include <string>

#include "simtdiv/error.hpp"

namespace simtdiv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <class F>
void for_each_lane(LaneMask mask, F&& f) {
  while (mask != 0) {
    const unsigned lane = static_cast<unsigned>(std::countr_zero(mask));
    f(lane);
    mask &= mask - 1;
  }
}

}  // namespace

std::int32_t RunResult::int_reg(unsigned lane, Reg reg) const {
  if (reg.is_zero()) return 0;
  return static_cast<std::int32_t>(registers.at(lane).at(reg.index));
}

float RunResult::float_reg(unsigned lane, Reg reg) const {
  if (reg.is_zero()) return 0.0f;
  return std::bit_cast<float>(registers.at(lane).at(reg.index));
}

WarpState::WarpState(const ArchProfile& profile, LaneMask launch_mask,
                     unsigned num_registers, unsigned num_predicates)
    : profile_(profile),
      launch_mask_(launch_mask),
      num_registers_(num_registers),
      num_predicates_(num_predicates),
      active_(launch_mask),
      stack_(profile.phys_capacity, profile.spill_chunk),
      regs_(kWarpSize, std::vector<std::uint32_t>(num_registers, 0)),
      preds_(kWarpSize, std::vector<bool>(num_predicates, false)),
      slots_(kWarpSize) {
  if (launch_mask == 0) throw ConfigError("launch mask must enable at least one lane");
}

std::uint32_t WarpState::reg(unsigned lane, Reg r) const {
  if (r.is_zero()) return 0;
  return regs_.at(lane).at(r.index);
}

void WarpState::set_reg(unsigned lane, Reg r, std::uint32_t value) {
  if (r.is_zero()) return;
  regs_.at(lane).at(r.index) = value;
}

bool WarpState::pred(unsigned lane, Pred p) const {
  if (p.is_true()) return true;
  return preds_.at(lane).at(p.index);
}

void WarpState::set_pred(unsigned lane, Pred p, bool value) {
  if (p.is_true()) return;
  preds_.at(lane).at(p.index) = value;
}

StepEvents WarpState::branch(Address target, LaneMask taken) {
  const LaneMask active_taken = active_ & taken;
  if (active_taken == 0) {
    ++pc_;
    return {};
  }
  StepEvents events;
  if (active_taken != active_) {
    events = stack_.push(Token{active_ & ~taken, TokenId::kDiv, pc_ + 1});
  }
  active_ = active_taken;
  pc_ = target;
  return events;
}

void WarpState::execute(const Instruction& ins) {
  auto value = [&](unsigned lane, const Operand& o) -> std::uint32_t {
    if (const auto* r = std::get_if<Reg>(&o)) return reg(lane, *r);
    return static_cast<std::uint32_t>(std::get<std::int32_t>(o));
  };
  std::visit(
      Overloaded{
          [](const op::Ssy&) {},
          [](const op::Bra&) {},
          [](const op::Nop&) {},
          [&](const op::Iadd& o) {
            for_each_lane(active_, [&](unsigned lane) {
              set_reg(lane, o.dst, reg(lane, o.a) + value(lane, o.b));
            });
          },
          [&](const op::FaddImm& o) {
            for_each_lane(active_, [&](unsigned lane) {
              const float sum = std::bit_cast<float>(reg(lane, o.src)) + o.imm;
              set_reg(lane, o.dst, std::bit_cast<std::uint32_t>(sum));
            });
          },
          [&](const op::IsetpLt& o) {
            for_each_lane(active_, [&](unsigned lane) {
              set_pred(lane, o.dst,
                       static_cast<std::int32_t>(reg(lane, o.a)) <
                           static_cast<std::int32_t>(value(lane, o.b)));
            });
          },
          [&](const op::Mov& o) {
            for_each_lane(active_, [&](unsigned lane) {
              set_reg(lane, o.dst, value(lane, o.src));
            });
          },
          [&](const op::Clock& o) {
            const auto now = static_cast<std::uint32_t>(cycle_);
            for_each_lane(active_, [&](unsigned lane) { set_reg(lane, o.dst, now); });
          },
          [&](const op::StoreSlot& o) {
            for_each_lane(active_, [&](unsigned lane) {
              const auto slot = static_cast<std::int32_t>(value(lane, o.slot));
              slots_[lane][slot] = reg(lane, o.src);
            });
          },
          [&](const op::Exit&) {
            if (!stack_.empty()) {
              throw ModelError("EXIT at pc " + std::to_string(ins.address) +
                               " with " + std::to_string(stack_.depth()) +
                               " token(s) on the synchronization stack");
            }
            if (active_ != launch_mask_) {
              throw ModelError("EXIT at pc " + std::to_string(ins.address) +
                               " without full re-convergence");
            }
            exited_ = true;
          },
      },
      ins.opcode);
}

StepRecord WarpState::step(const Program& program) {
  if (exited_) throw ModelError("step after EXIT");
  const Instruction& ins = program.at(pc_);

  StepRecord rec;
  rec.ordinal = counters_.executed_instructions + 1;
  rec.pc = pc_;
  rec.kind = kind_of(ins.opcode);
  rec.pop_bit = ins.pop_bit;
  rec.mask_before = active_;

  StepEvents events;
  if (const auto* ssy = std::get_if<op::Ssy>(&ins.opcode)) {
    const Token token{active_, TokenId::kSync, ssy->target};
    events = stack_.push(token);
    rec.token = token;
    ++pc_;
    cycle_ += profile_.issue_cycles + charge(events.view(), profile_);
  } else if (const auto* bra = std::get_if<op::Bra>(&ins.opcode)) {
    LaneMask taken = 0;
    for (unsigned lane = 0; lane < kWarpSize; ++lane) {
      if (pred(lane, bra->pred)) taken |= LaneMask{1} << lane;
    }
    events = branch(bra->target, taken);
    if (events.contains(CostEvent::kDivPush)) rec.token = stack_.top();
    ++counters_.executed_branches;
    cycle_ += profile_.issue_cycles + charge(events.view(), profile_);
  } else if (ins.pop_bit) {
    auto [token, pop_events] = stack_.pop();
    events = pop_events;
    rec.token = token;
    active_ = token.mask;
    pc_ = token.pc;
    // The carrier runs after unwinding, under the restored mask.
    cycle_ += charge(events.view(), profile_);
    execute(ins);
    if (token.id != TokenId::kDiv) cycle_ += profile_.issue_cycles;
  } else {
    execute(ins);
    if (!exited_) ++pc_;
    cycle_ += profile_.issue_cycles;
  }

  counters_.events.add(events.view());
  ++counters_.executed_instructions;

  rec.mask_after = active_;
  rec.depth_after = stack_.depth();
  rec.events = events;
  rec.cycle_after = cycle_;
  return rec;
}

RunResult run(const Program& program, const LaunchConfig& launch) {
  launch.profile.validate();
  WarpState warp(launch.profile, launch.launch_mask, program.num_registers(),
                 program.num_predicates());
  for (const auto& [name, values] : launch.registers) {
    auto reg = program.resolve_register(name);
    if (!reg || reg->is_zero()) {
      throw ConfigError("launch register '" + name + "' is not a writable register");
    }
    if (values.size() != kWarpSize) {
      throw ConfigError("launch register '" + name + "' needs 32 values, got " +
                        std::to_string(values.size()));
    }
    for (unsigned lane = 0; lane < kWarpSize; ++lane) {
      warp.set_reg(lane, *reg, static_cast<std::uint32_t>(values[lane]));
    }
  }

  RunResult result;
  result.depth_history.push_back({0, 0});
  std::size_t depth = 0;
  while (!warp.exited()) {
    if (warp.counters().executed_instructions >= launch.instruction_budget) {
      throw BudgetExceeded("instruction budget of " +
                           std::to_string(launch.instruction_budget) +
                           " exhausted before EXIT");
    }
    StepRecord rec = warp.step(program);
    if (rec.depth_after != depth) {
      depth = rec.depth_after;
      result.depth_history.push_back({rec.ordinal, depth});
      if (depth > result.max_depth) result.max_depth = depth;
    }
    if (launch.record_trace) result.trace.push_back(rec);
  }

  result.counters = warp.counters();
  result.total_cycles = warp.cycle();
  result.final_mask = warp.active_mask();
  result.registers.resize(kWarpSize);
  result.slots.resize(kWarpSize);
  for (unsigned lane = 0; lane < kWarpSize; ++lane) {
    auto& regs = result.registers[lane];
    regs.resize(program.num_registers());
    for (unsigned r = 0; r < program.num_registers(); ++r) {
      regs[r] = warp.reg(lane, Reg{static_cast<std::uint8_t>(r)});
    }
    result.slots[lane] = warp.slots(lane);
  }
  return result;
}

}  // namespace simtdiv
