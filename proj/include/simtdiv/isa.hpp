#pragma once

// Miniature SASS-like instruction set: just enough to express loop kernels
// with SSY, predicated branches and pop-bit carriers.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace simtdiv {

/// Instruction index; one unit per instruction.
using Address = std::uint32_t;

struct Reg {
  static constexpr std::uint8_t kZero = 0xFF;  // RZ

  std::uint8_t index = kZero;

  static constexpr Reg zero() { return Reg{kZero}; }
  constexpr bool is_zero() const { return index == kZero; }
  friend constexpr bool operator==(Reg, Reg) = default;
};

struct Pred {
  static constexpr std::uint8_t kTrue = 0xFF;  // PT

  std::uint8_t index = kTrue;

  static constexpr Pred always() { return Pred{kTrue}; }
  constexpr bool is_true() const { return index == kTrue; }
  friend constexpr bool operator==(Pred, Pred) = default;
};

/// Second source operand: a register or a 32-bit immediate.
using Operand = std::variant<Reg, std::int32_t>;

namespace op {

struct Ssy {
  Address target = 0;
  friend bool operator==(const Ssy&, const Ssy&) = default;
};
/// `@P BRA target`; an unpredicated BRA carries PT.
struct Bra {
  Address target = 0;
  Pred pred = Pred::always();
  friend bool operator==(const Bra&, const Bra&) = default;
};
struct Nop {
  friend bool operator==(const Nop&, const Nop&) = default;
};
struct Iadd {
  Reg dst;
  Reg a;
  Operand b;
  friend bool operator==(const Iadd&, const Iadd&) = default;
};
struct FaddImm {
  Reg dst;
  Reg src;
  float imm = 0.0f;
  friend bool operator==(const FaddImm&, const FaddImm&) = default;
};
/// Signed `a < b`.
struct IsetpLt {
  Pred dst;
  Reg a;
  Operand b;
  friend bool operator==(const IsetpLt&, const IsetpLt&) = default;
};
struct Mov {
  Reg dst;
  Operand src;
  friend bool operator==(const Mov&, const Mov&) = default;
};
/// Reads the warp cycle counter (low 32 bits).
struct Clock {
  Reg dst;
  friend bool operator==(const Clock&, const Clock&) = default;
};
/// Stores `src` into the per-thread timestamp slot selected by `slot`.
struct StoreSlot {
  Operand slot;
  Reg src;
  friend bool operator==(const StoreSlot&, const StoreSlot&) = default;
};
struct Exit {
  friend bool operator==(const Exit&, const Exit&) = default;
};

}  // namespace op

using Opcode = std::variant<op::Ssy, op::Bra, op::Nop, op::Iadd, op::FaddImm,
                            op::IsetpLt, op::Mov, op::Clock, op::StoreSlot,
                            op::Exit>;

enum class OpKind : std::uint8_t {
  kSsy,
  kBra,
  kNop,
  kIadd,
  kFaddImm,
  kIsetpLt,
  kMov,
  kClock,
  kStoreSlot,
  kExit,
};

OpKind kind_of(const Opcode& opcode);
std::string_view mnemonic(OpKind kind);
/// Branch or SSY target, if the opcode has one.
std::optional<Address> target_of(const Opcode& opcode);

struct Instruction {
  Opcode opcode;
  bool pop_bit = false;  // `.S` suffix
  Address address = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// A validated, immutable instruction sequence.
///
/// Construction checks: non-empty; exactly one EXIT and it is the last
/// instruction; addresses are 0,1,2,...; every SSY/BRA target, label and
/// alias is in range; register/predicate indices fit the declared files;
/// SSY and BRA never carry the pop-bit.
class Program {
 public:
  static constexpr unsigned kDefaultRegisters = 64;
  static constexpr unsigned kDefaultPredicates = 7;

  Program(std::vector<Instruction> instructions,
          std::map<std::string, Address> labels,
          std::map<std::string, Reg> aliases = {},
          unsigned num_registers = kDefaultRegisters,
          unsigned num_predicates = kDefaultPredicates);

  std::span<const Instruction> instructions() const { return instructions_; }
  std::size_t size() const { return instructions_.size(); }
  const Instruction& at(Address address) const;

  const std::map<std::string, Address>& labels() const { return labels_; }
  const std::map<std::string, Reg>& aliases() const { return aliases_; }
  unsigned num_registers() const { return num_registers_; }
  unsigned num_predicates() const { return num_predicates_; }

  /// Resolves `R<k>`, `RZ` or a declared alias.
  std::optional<Reg> resolve_register(std::string_view name) const;

  friend bool operator==(const Program&, const Program&) = default;

 private:
  void validate() const;

  std::vector<Instruction> instructions_;
  std::map<std::string, Address> labels_;
  std::map<std::string, Reg> aliases_;
  unsigned num_registers_;
  unsigned num_predicates_;
};

/// Assembles a Program from code, resolving label names on build().
class ProgramBuilder {
 public:
  ProgramBuilder& registers(unsigned count);
  ProgramBuilder& predicates(unsigned count);
  ProgramBuilder& alias(std::string name, Reg reg);
  /// Binds `name` to the next emitted instruction.
  ProgramBuilder& label(std::string name);

  ProgramBuilder& ssy(std::string target);
  ProgramBuilder& bra(std::string target, Pred pred = Pred::always());
  ProgramBuilder& nop(bool pop_bit = false);
  ProgramBuilder& iadd(Reg dst, Reg a, Operand b, bool pop_bit = false);
  ProgramBuilder& fadd_imm(Reg dst, Reg src, float imm, bool pop_bit = false);
  ProgramBuilder& isetp_lt(Pred dst, Reg a, Operand b, bool pop_bit = false);
  ProgramBuilder& mov(Reg dst, Operand src, bool pop_bit = false);
  ProgramBuilder& clock(Reg dst, bool pop_bit = false);
  ProgramBuilder& store_slot(Operand slot, Reg src, bool pop_bit = false);
  ProgramBuilder& exit();

  /// Throws ProgramError on an unresolved or duplicate label.
  Program build() const;

 private:
  ProgramBuilder& emit(Opcode opcode, bool pop_bit,
                       std::optional<std::string> target = std::nullopt);

  struct Pending {
    Opcode opcode;
    bool pop_bit;
    std::optional<std::string> target;
  };

  std::vector<Pending> pending_;
  std::vector<std::pair<std::string, Address>> labels_;
  std::map<std::string, Reg> aliases_;
  unsigned num_registers_ = Program::kDefaultRegisters;
  unsigned num_predicates_ = Program::kDefaultPredicates;
};

/// Parses assembly text.
///
/// One statement per line: optional `label:` prefixes, an optional `@Pk`
/// guard (BRA only), a mnemonic with optional `.S` pop-bit suffix and
/// comma-separated operands. `;` and `#` start comments. Directives
/// `.registers N`, `.predicates N` and `.alias NAME Rk` must precede the
/// first instruction. Throws ParseError naming the offending line.
Program parse_program(std::string_view text);

/// Renders a Program such that parse_program(format_program(p)) == p.
std::string format_program(const Program& program);

}  // namespace simtdiv
