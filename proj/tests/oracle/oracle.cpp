#include "oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "simtdiv/kernels.hpp"

namespace simtdiv::oracle {
namespace {

struct Scalar {
  const Program& program;
  std::vector<std::uint32_t> regs;
  std::vector<bool> preds;
  ScalarResult out;

  std::uint32_t read(Reg r) const { return r.is_zero() ? 0u : regs[r.index]; }
  void write(Reg r, std::uint32_t v) {
    if (!r.is_zero()) regs[r.index] = v;
  }
  std::uint32_t value(const Operand& o) const {
    if (const Reg* r = std::get_if<Reg>(&o)) return read(*r);
    return static_cast<std::uint32_t>(std::get<std::int32_t>(o));
  }
  bool pred(Pred p) const { return p.is_true() || preds[p.index]; }
};

std::string hex(LaneMask m) {
  std::ostringstream s;
  s << "0x" << std::hex << std::uppercase << m;
  return s.str();
}

}  // namespace

ScalarResult run_scalar(const Program& program,
                        const std::map<std::string, std::int32_t>& initial,
                        std::uint64_t budget) {
  Scalar s{program, std::vector<std::uint32_t>(program.num_registers(), 0),
           std::vector<bool>(program.num_predicates(), false), {}};
  for (const auto& [name, v] : initial) {
    auto reg = program.resolve_register(name);
    if (!reg || reg->is_zero()) throw std::invalid_argument("bad register " + name);
    s.regs[reg->index] = static_cast<std::uint32_t>(v);
  }
  s.out.visits.assign(program.size(), 0);

  Address pc = 0;
  for (;;) {
    if (s.out.executed++ >= budget) throw std::runtime_error("scalar budget exceeded");
    const Instruction& ins = program.at(pc);
    ++s.out.visits[pc];
    Address next = pc + 1;
    bool done = false;
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, op::Bra>) {
            if (s.pred(o.pred)) next = o.target;
          } else if constexpr (std::is_same_v<T, op::Iadd>) {
            s.write(o.dst, s.read(o.a) + s.value(o.b));
          } else if constexpr (std::is_same_v<T, op::FaddImm>) {
            const float sum = std::bit_cast<float>(s.read(o.src)) + o.imm;
            s.write(o.dst, std::bit_cast<std::uint32_t>(sum));
          } else if constexpr (std::is_same_v<T, op::IsetpLt>) {
            if (!o.dst.is_true()) {
              s.preds[o.dst.index] = static_cast<std::int32_t>(s.read(o.a)) <
                                     static_cast<std::int32_t>(s.value(o.b));
            }
          } else if constexpr (std::is_same_v<T, op::Mov>) {
            s.write(o.dst, s.value(o.src));
          } else if constexpr (std::is_same_v<T, op::Clock>) {
            s.write(o.dst, 0);
          } else if constexpr (std::is_same_v<T, op::StoreSlot>) {
            s.out.slots[static_cast<std::int32_t>(s.value(o.slot))] = s.read(o.src);
          } else if constexpr (std::is_same_v<T, op::Exit>) {
            done = true;
          }
          // Ssy, Nop: nothing
        },
        ins.opcode);
    if (done) break;
    pc = next;
  }
  s.out.registers = std::move(s.regs);
  return std::move(s.out);
}

std::map<std::string, std::int32_t> lane_registers(const LaunchConfig& launch,
                                                   unsigned lane) {
  std::map<std::string, std::int32_t> out;
  for (const auto& [name, values] : launch.registers) out[name] = values.at(lane);
  return out;
}

std::vector<std::string> check_invariants(const Program& program,
                                          const RunResult& result,
                                          LaneMask launch_mask) {
  std::vector<std::string> bad;
  auto fail = [&](const StepRecord* rec, const std::string& what) {
    std::ostringstream s;
    if (rec) s << "step " << rec->ordinal << " pc " << rec->pc << ": ";
    s << what;
    bad.push_back(s.str());
  };

  if (result.trace.size() != result.counters.executed_instructions) {
    fail(nullptr, "trace missing or incomplete");
    return bad;
  }

  struct Entry {
    Token token;
    Address origin;
  };
  std::vector<Entry> shadow;
  std::uint64_t pushes = 0, pops = 0;
  std::size_t peak = 0;

  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const StepRecord& rec = result.trace[i];
    const Instruction& ins = program.at(rec.pc);
    const bool sync_push = rec.events.contains(CostEvent::kSyncPush);
    const bool div_push = rec.events.contains(CostEvent::kDivPush);
    const bool sync_pop = rec.events.contains(CostEvent::kSyncPop);
    const bool div_pop = rec.events.contains(CostEvent::kDivPop);
    if (sync_push + div_push + sync_pop + div_pop > 1) fail(&rec, "more than one stack operation");

    if (sync_push) {
      ++pushes;
      const Token expect{rec.mask_before, TokenId::kSync, *target_of(ins.opcode)};
      if (rec.kind != OpKind::kSsy) fail(&rec, "SYNC pushed by a non-SSY");
      if (!rec.token || *rec.token != expect) fail(&rec, "SYNC token does not record mask/target");
      shadow.push_back({expect, rec.pc});
    } else if (div_push) {
      ++pushes;
      if (!rec.token) {
        fail(&rec, "DIV push without token");
        continue;
      }
      const LaneMask deferred = rec.token->mask;
      if (deferred == 0) fail(&rec, "empty DIV mask");
      if (rec.mask_after == 0) fail(&rec, "empty taken mask");
      if ((deferred | rec.mask_after) != rec.mask_before) {
        fail(&rec, "DIV " + hex(deferred) + " | active " + hex(rec.mask_after) +
                       " != " + hex(rec.mask_before));
      }
      if ((deferred & rec.mask_after) != 0) fail(&rec, "DIV and active masks overlap");
      if (rec.token->pc != rec.pc + 1) fail(&rec, "DIV token must resume at pc+1");
      shadow.push_back({*rec.token, rec.pc});
    } else if (sync_pop || div_pop) {
      ++pops;
      if (!rec.pop_bit) fail(&rec, "pop without pop-bit");
      if (shadow.empty()) {
        fail(&rec, "pop with empty shadow stack");
        continue;
      }
      const Entry top = shadow.back();
      shadow.pop_back();
      if (!rec.token || *rec.token != top.token) fail(&rec, "popped token differs from shadow top");
      if (sync_pop && top.token.id != TokenId::kSync) fail(&rec, "SYNC_POP of a DIV token");
      if (div_pop && top.token.id != TokenId::kDiv) fail(&rec, "DIV_POP of a SYNC token");
      if (rec.mask_after != top.token.mask) {
        fail(&rec, "mask after pop " + hex(rec.mask_after) + " != token " +
                       hex(top.token.mask));
      }
      if (i + 1 < result.trace.size() && result.trace[i + 1].pc != top.token.pc) {
        fail(&rec, "execution did not resume at token pc");
      }
    } else if (rec.pop_bit) {
      fail(&rec, "pop-bit instruction without pop");
    }

    if (rec.depth_after != shadow.size()) {
      fail(&rec, "depth " + std::to_string(rec.depth_after) + " != shadow " +
                     std::to_string(shadow.size()));
    }
    peak = std::max(peak, shadow.size());

    if (rec.kind == OpKind::kBra) {
      const Address target = *target_of(ins.opcode);
      if (target <= rec.pc) {
        for (const Entry& e : shadow) {
          if (e.token.id == TokenId::kSync && e.origin >= target && e.origin <= rec.pc) {
            fail(&rec, "SYNC from SSY at " + std::to_string(e.origin) +
                           " still live at backward branch");
          }
        }
      }
    }
  }

  const auto& ev = result.counters.events;
  if (pushes != ev.pushes() || pops != ev.pops()) fail(nullptr, "trace and counters disagree");
  if (ev.pushes() != ev.pops()) {
    fail(nullptr, "pushes " + std::to_string(ev.pushes()) + " != pops " +
                      std::to_string(ev.pops()));
  }
  if (!shadow.empty()) fail(nullptr, "stack not empty at exit");
  if (ev.spill_stores != ev.spill_loads) fail(nullptr, "spill stores != spill loads");
  if (result.final_mask != launch_mask) fail(nullptr, "exit mask " + hex(result.final_mask));
  if (peak != result.max_depth) fail(nullptr, "max depth differs from trace peak");
  return bad;
}

RunResult checked_run(const Program& program, LaunchConfig launch) {
  launch.record_trace = true;
  RunResult result = run(program, launch);
  const auto bad = check_invariants(program, result, launch.launch_mask);
  if (!bad.empty()) {
    std::string msg = "invariant violations:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw std::logic_error(msg);
  }
  return result;
}

std::vector<std::uint64_t> lane_visits(const RunResult& result, Address address) {
  std::vector<std::uint64_t> counts(kWarpSize, 0);
  for (const StepRecord& rec : result.trace) {
    if (rec.pc != address) continue;
    const LaneMask m = rec.pop_bit ? rec.mask_after : rec.mask_before;
    for (unsigned lane = 0; lane < kWarpSize; ++lane) {
      if (m >> lane & 1u) ++counts[lane];
    }
  }
  return counts;
}

LoopNest make_loop_nest(unsigned depth) {
  if (depth < 1 || depth > 4) throw std::invalid_argument("depth 1..4");
  std::vector<std::string> limit_names, body_labels;
  std::vector<float> increments;
  ProgramBuilder b;
  const Pred p0{0};
  for (unsigned k = 0; k < depth; ++k) {
    limit_names.push_back("M" + std::to_string(k));
    b.alias(limit_names.back(), Reg{static_cast<std::uint8_t>(20 + k)});
    increments.push_back(k + 1 == depth ? kInnerIncrement : kOuterIncrement + k);
    body_labels.push_back("body" + std::to_string(k));
  }
  b.clock(Reg{30});

  auto emit = [&](auto&& self, unsigned k) -> void {
    const std::string id = std::to_string(k);
    const Reg limit{static_cast<std::uint8_t>(20 + k)};
    const Reg counter{static_cast<std::uint8_t>(10 + k)};
    b.isetp_lt(p0, limit, 1);
    b.mov(counter, Reg::zero());
    b.ssy("done" + id);
    b.bra("sync" + id, p0);
    b.label("body" + id);
    if (k + 1 < depth) self(self, k + 1);
    b.iadd(counter, counter, 1);
    b.fadd_imm(kAccumulator, kAccumulator, increments[k]);
    b.isetp_lt(p0, counter, limit);
    b.bra("body" + id, p0);
    b.label("sync" + id).nop(true);
    b.label("done" + id);
  };
  emit(emit, 0);
  b.clock(Reg{31});
  b.exit();
  return LoopNest{b.build(), std::move(limit_names), std::move(increments),
                  std::move(body_labels)};
}

LoopNest random_loop_nest(std::mt19937& rng) {
  return make_loop_nest(std::uniform_int_distribution<unsigned>(1, 3)(rng));
}

std::vector<std::int32_t> random_bounds(std::mt19937& rng, std::int32_t lo, std::int32_t hi) {
  std::uniform_int_distribution<std::int32_t> d(lo, hi);
  std::vector<std::int32_t> v(kWarpSize);
  for (auto& x : v) x = d(rng);
  return v;
}

std::uint64_t ulp_distance(float a, float b) {
  auto key = [](float f) {
    const auto bits = std::bit_cast<std::int32_t>(f);
    return bits < 0 ? static_cast<std::int64_t>(INT32_MIN) - bits : static_cast<std::int64_t>(bits);
  };
  const std::int64_t d = key(a) - key(b);
  return static_cast<std::uint64_t>(d < 0 ? -d : d);
}

}  // namespace simtdiv::oracle
