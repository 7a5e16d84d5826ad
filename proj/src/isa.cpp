#include "simtdiv/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

#include "simtdiv/error.hpp"

namespace simtdiv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$';
}

bool is_identifier(std::string_view s) {
  return !s.empty() && is_ident_start(s.front()) &&
         std::all_of(s.begin(), s.end(), is_ident_char);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

// `R<digits>` or `RZ`; aliases must not shadow these.
bool looks_like_register(std::string_view s) {
  return s == "RZ" || (s.size() > 1 && s[0] == 'R' && all_digits(s.substr(1)));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

void check_reg(Reg r, unsigned num_registers, std::string_view what) {
  if (!r.is_zero() && r.index >= num_registers) {
    throw ProgramError(std::string(what) + ": register R" +
                       std::to_string(r.index) + " outside register file of " +
                       std::to_string(num_registers));
  }
}

void check_pred(Pred p, unsigned num_predicates, std::string_view what) {
  if (!p.is_true() && p.index >= num_predicates) {
    throw ProgramError(std::string(what) + ": predicate P" +
                       std::to_string(p.index) +
                       " outside predicate file of " +
                       std::to_string(num_predicates));
  }
}

void check_operand(const Operand& o, unsigned num_registers,
                   std::string_view what) {
  if (const auto* r = std::get_if<Reg>(&o)) check_reg(*r, num_registers, what);
}

}  // namespace

OpKind kind_of(const Opcode& opcode) {
  return static_cast<OpKind>(opcode.index());
}

std::string_view mnemonic(OpKind kind) {
  switch (kind) {
    case OpKind::kSsy: return "SSY";
    case OpKind::kBra: return "BRA";
    case OpKind::kNop: return "NOP";
    case OpKind::kIadd: return "IADD";
    case OpKind::kFaddImm: return "FADD32I";
    case OpKind::kIsetpLt: return "ISETP.LT";
    case OpKind::kMov: return "MOV";
    case OpKind::kClock: return "CLOCK";
    case OpKind::kStoreSlot: return "STORE_SLOT";
    case OpKind::kExit: return "EXIT";
  }
  return "?";
}

std::optional<Address> target_of(const Opcode& opcode) {
  if (const auto* s = std::get_if<op::Ssy>(&opcode)) return s->target;
  if (const auto* b = std::get_if<op::Bra>(&opcode)) return b->target;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Program

Program::Program(std::vector<Instruction> instructions,
                 std::map<std::string, Address> labels,
                 std::map<std::string, Reg> aliases, unsigned num_registers,
                 unsigned num_predicates)
    : instructions_(std::move(instructions)),
      labels_(std::move(labels)),
      aliases_(std::move(aliases)),
      num_registers_(num_registers),
      num_predicates_(num_predicates) {
  validate();
}

const Instruction& Program::at(Address address) const {
  if (address >= instructions_.size()) {
    throw ModelError("pc " + std::to_string(address) +
                     " outside program of length " +
                     std::to_string(instructions_.size()));
  }
  return instructions_[address];
}

std::optional<Reg> Program::resolve_register(std::string_view name) const {
  if (name == "RZ") return Reg::zero();
  if (looks_like_register(name)) {
    unsigned index = 0;
    auto [ptr, ec] =
        std::from_chars(name.data() + 1, name.data() + name.size(), index);
    if (ec != std::errc{} || index >= num_registers_) return std::nullopt;
    return Reg{static_cast<std::uint8_t>(index)};
  }
  if (auto it = aliases_.find(std::string(name)); it != aliases_.end()) {
    return it->second;
  }
  return std::nullopt;
}

void Program::validate() const {
  if (instructions_.empty()) throw ProgramError("program is empty");
  if (num_registers_ == 0 || num_registers_ > Reg::kZero) {
    throw ProgramError("register file size must be in 1..254");
  }
  if (num_predicates_ == 0 || num_predicates_ > Pred::kTrue) {
    throw ProgramError("predicate file size must be in 1..254");
  }
  const auto size = static_cast<Address>(instructions_.size());
  std::size_t exits = 0;
  for (Address i = 0; i < size; ++i) {
    const Instruction& ins = instructions_[i];
    const std::string where = "instruction " + std::to_string(i);
    if (ins.address != i) {
      throw ProgramError(where + ": address " + std::to_string(ins.address) +
                         " is not sequential");
    }
    if (auto t = target_of(ins.opcode); t && *t >= size) {
      throw ProgramError(where + ": target " + std::to_string(*t) +
                         " out of range");
    }
    std::visit(
        Overloaded{
            [&](const op::Ssy&) {
              if (ins.pop_bit) throw ProgramError(where + ": SSY cannot carry .S");
            },
            [&](const op::Bra& b) {
              if (ins.pop_bit) throw ProgramError(where + ": BRA cannot carry .S");
              check_pred(b.pred, num_predicates_, where);
            },
            [&](const op::Nop&) {},
            [&](const op::Iadd& o) {
              check_reg(o.dst, num_registers_, where);
              check_reg(o.a, num_registers_, where);
              check_operand(o.b, num_registers_, where);
            },
            [&](const op::FaddImm& o) {
              check_reg(o.dst, num_registers_, where);
              check_reg(o.src, num_registers_, where);
              if (!std::isfinite(o.imm)) {
                throw ProgramError(where + ": non-finite float immediate");
              }
            },
            [&](const op::IsetpLt& o) {
              check_pred(o.dst, num_predicates_, where);
              check_reg(o.a, num_registers_, where);
              check_operand(o.b, num_registers_, where);
            },
            [&](const op::Mov& o) {
              check_reg(o.dst, num_registers_, where);
              check_operand(o.src, num_registers_, where);
            },
            [&](const op::Clock& o) { check_reg(o.dst, num_registers_, where); },
            [&](const op::StoreSlot& o) {
              check_operand(o.slot, num_registers_, where);
              check_reg(o.src, num_registers_, where);
            },
            [&](const op::Exit&) { ++exits; },
        },
        ins.opcode);
  }
  if (!std::holds_alternative<op::Exit>(instructions_.back().opcode) ||
      exits != 1) {
    throw ProgramError("program must contain exactly one EXIT, as its last "
                       "instruction");
  }
  for (const auto& [name, address] : labels_) {
    if (!is_identifier(name)) throw ProgramError("invalid label name '" + name + "'");
    if (address >= size) {
      throw ProgramError("label '" + name + "' does not precede an instruction");
    }
  }
  for (const auto& [name, reg] : aliases_) {
    if (!is_identifier(name) || looks_like_register(name)) {
      throw ProgramError("invalid alias name '" + name + "'");
    }
    if (reg.is_zero()) throw ProgramError("alias '" + name + "' cannot name RZ");
    check_reg(reg, num_registers_, "alias " + name);
  }
}

// ---------------------------------------------------------------------------
// ProgramBuilder

ProgramBuilder& ProgramBuilder::registers(unsigned count) {
  num_registers_ = count;
  return *this;
}

ProgramBuilder& ProgramBuilder::predicates(unsigned count) {
  num_predicates_ = count;
  return *this;
}

ProgramBuilder& ProgramBuilder::alias(std::string name, Reg reg) {
  aliases_[std::move(name)] = reg;
  return *this;
}

ProgramBuilder& ProgramBuilder::label(std::string name) {
  labels_.emplace_back(std::move(name), static_cast<Address>(pending_.size()));
  return *this;
}

ProgramBuilder& ProgramBuilder::emit(Opcode opcode, bool pop_bit,
                                     std::optional<std::string> target) {
  pending_.push_back({std::move(opcode), pop_bit, std::move(target)});
  return *this;
}

ProgramBuilder& ProgramBuilder::ssy(std::string target) {
  return emit(op::Ssy{}, false, std::move(target));
}
ProgramBuilder& ProgramBuilder::bra(std::string target, Pred pred) {
  return emit(op::Bra{0, pred}, false, std::move(target));
}
ProgramBuilder& ProgramBuilder::nop(bool pop_bit) {
  return emit(op::Nop{}, pop_bit);
}
ProgramBuilder& ProgramBuilder::iadd(Reg dst, Reg a, Operand b, bool pop_bit) {
  return emit(op::Iadd{dst, a, b}, pop_bit);
}
ProgramBuilder& ProgramBuilder::fadd_imm(Reg dst, Reg src, float imm,
                                         bool pop_bit) {
  return emit(op::FaddImm{dst, src, imm}, pop_bit);
}
ProgramBuilder& ProgramBuilder::isetp_lt(Pred dst, Reg a, Operand b,
                                         bool pop_bit) {
  return emit(op::IsetpLt{dst, a, b}, pop_bit);
}
ProgramBuilder& ProgramBuilder::mov(Reg dst, Operand src, bool pop_bit) {
  return emit(op::Mov{dst, src}, pop_bit);
}
ProgramBuilder& ProgramBuilder::clock(Reg dst, bool pop_bit) {
  return emit(op::Clock{dst}, pop_bit);
}
ProgramBuilder& ProgramBuilder::store_slot(Operand slot, Reg src,
                                           bool pop_bit) {
  return emit(op::StoreSlot{slot, src}, pop_bit);
}
ProgramBuilder& ProgramBuilder::exit() { return emit(op::Exit{}, false); }

Program ProgramBuilder::build() const {
  std::map<std::string, Address> labels;
  for (const auto& [name, address] : labels_) {
    if (!labels.emplace(name, address).second) {
      throw ProgramError("duplicate label '" + name + "'");
    }
  }
  std::vector<Instruction> instructions;
  instructions.reserve(pending_.size());
  for (const Pending& p : pending_) {
    Instruction ins{p.opcode, p.pop_bit,
                    static_cast<Address>(instructions.size())};
    if (p.target) {
      auto it = labels.find(*p.target);
      if (it == labels.end()) {
        throw ProgramError("unresolved label '" + *p.target + "'");
      }
      if (auto* s = std::get_if<op::Ssy>(&ins.opcode)) s->target = it->second;
      if (auto* b = std::get_if<op::Bra>(&ins.opcode)) b->target = it->second;
    }
    instructions.push_back(std::move(ins));
  }
  return Program(std::move(instructions), std::move(labels), aliases_,
                 num_registers_, num_predicates_);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Statement {
  int line = 0;
  std::optional<std::string> guard;
  std::string mnemonic;
  std::vector<std::string> operands;
};

std::vector<std::string> split_operands(std::string_view rest) {
  std::vector<std::string> out;
  rest = trim(rest);
  if (rest.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = rest.find(',', start);
    out.emplace_back(trim(rest.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program parse() {
    scan();
    std::vector<Instruction> instructions;
    instructions.reserve(statements_.size());
    for (const Statement& st : statements_) {
      instructions.push_back(assemble(st, static_cast<Address>(instructions.size())));
    }
    try {
      return Program(std::move(instructions), labels_, aliases_, num_registers_,
                     num_predicates_);
    } catch (const ProgramError& e) {
      throw ParseError(statements_.empty() ? last_line_ : statements_.back().line,
                       e.what());
    }
  }

 private:
  // Pass 1: directives, labels and statement boundaries.
  void scan() {
    std::map<std::string, int> alias_lines;
    std::vector<std::pair<std::string, std::string>> pending_aliases;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      auto eol = text_.find('\n', pos);
      std::string_view line = text_.substr(
          pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
      pos = eol == std::string_view::npos ? text_.size() + 1 : eol + 1;
      ++line_no;
      last_line_ = line_no;

      if (auto c = line.find_first_of(";#"); c != std::string_view::npos) {
        line = line.substr(0, c);
      }
      line = trim(line);
      if (line.empty()) continue;

      if (line.front() == '.') {
        directive(line, line_no, pending_aliases, alias_lines);
        continue;
      }

      // Leading `label:` prefixes.
      while (true) {
        std::size_t i = 0;
        if (!is_ident_start(line[0])) break;
        while (i < line.size() && is_ident_char(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j >= line.size() || line[j] != ':') break;
        std::string name(line.substr(0, i));
        if (!label_lines_.emplace(name, line_no).second) {
          throw ParseError(line_no, "duplicate label '" + name + "'");
        }
        labels_[name] = static_cast<Address>(statements_.size());
        line = trim(line.substr(j + 1));
        if (line.empty()) break;
      }
      if (line.empty()) continue;

      Statement st;
      st.line = line_no;
      if (line.front() == '@') {
        auto sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) {
          throw ParseError(line_no, "guard without instruction");
        }
        st.guard = std::string(line.substr(1, sp - 1));
        line = trim(line.substr(sp));
      }
      auto sp = line.find_first_of(" \t");
      st.mnemonic = upper(line.substr(0, sp));
      if (sp != std::string_view::npos) st.operands = split_operands(line.substr(sp));
      statements_.push_back(std::move(st));
    }

    for (const auto& [name, reg] : pending_aliases) {
      auto r = parse_reg_name(reg);
      if (!r || r->is_zero()) {
        throw ParseError(alias_lines[name], "alias target '" + reg +
                                                "' is not a register in R0..R" +
                                                std::to_string(num_registers_ - 1));
      }
      aliases_[name] = *r;
    }
    for (const auto& [name, address] : labels_) {
      if (address >= statements_.size()) {
        throw ParseError(label_lines_[name],
                         "label '" + name + "' does not precede an instruction");
      }
    }
  }

  void directive(std::string_view line, int line_no,
                 std::vector<std::pair<std::string, std::string>>& pending_aliases,
                 std::map<std::string, int>& alias_lines) {
    if (!statements_.empty()) {
      throw ParseError(line_no, "directives must precede the first instruction");
    }
    std::istringstream in{std::string(line)};
    std::string name, a, b, extra;
    in >> name >> a >> b >> extra;
    if (!extra.empty()) throw ParseError(line_no, "trailing tokens after " + name);
    auto count = [&](const std::string& s) {
      unsigned v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size() || v == 0 || v >= 255) {
        throw ParseError(line_no, name + " expects a count in 1..254");
      }
      return v;
    };
    if (name == ".registers" && b.empty()) {
      num_registers_ = count(a);
    } else if (name == ".predicates" && b.empty()) {
      num_predicates_ = count(a);
    } else if (name == ".alias" && !b.empty()) {
      if (!is_identifier(a) || looks_like_register(a)) {
        throw ParseError(line_no, "invalid alias name '" + a + "'");
      }
      if (alias_lines.count(a)) throw ParseError(line_no, "duplicate alias '" + a + "'");
      alias_lines[a] = line_no;
      pending_aliases.emplace_back(a, b);
    } else {
      throw ParseError(line_no, "malformed directive '" + std::string(line) + "'");
    }
  }

  std::optional<Reg> parse_reg_name(std::string_view s) const {
    if (s == "RZ") return Reg::zero();
    if (looks_like_register(s)) {
      unsigned index = 0;
      auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), index);
      if (ec != std::errc{} || index >= num_registers_) return std::nullopt;
      return Reg{static_cast<std::uint8_t>(index)};
    }
    return std::nullopt;
  }

  Reg reg(const Statement& st, const std::string& s) const {
    if (auto r = parse_reg_name(s)) return *r;
    if (looks_like_register(s)) {
      throw ParseError(st.line, "register " + s + " outside register file of " +
                                    std::to_string(num_registers_));
    }
    if (auto it = aliases_.find(s); it != aliases_.end()) return it->second;
    throw ParseError(st.line, "unknown register '" + s + "'");
  }

  Pred pred(const Statement& st, const std::string& s) const {
    if (s == "PT") return Pred::always();
    if (s.size() > 1 && s[0] == 'P' && all_digits(std::string_view(s).substr(1))) {
      unsigned index = 0;
      auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), index);
      if (ec == std::errc{} && index < num_predicates_) {
        return Pred{static_cast<std::uint8_t>(index)};
      }
      throw ParseError(st.line, "predicate " + s + " outside predicate file of " +
                                    std::to_string(num_predicates_));
    }
    throw ParseError(st.line, "expected predicate, got '" + s + "'");
  }

  static bool looks_numeric(const std::string& s) {
    return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) ||
                          s[0] == '-' || s[0] == '+');
  }

  std::int32_t imm(const Statement& st, const std::string& s) const {
    std::string_view v = s;
    bool negative = false;
    if (!v.empty() && (v[0] == '-' || v[0] == '+')) {
      negative = v[0] == '-';
      v.remove_prefix(1);
    }
    int base = 10;
    if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
      base = 16;
      v.remove_prefix(2);
    }
    std::uint64_t magnitude = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), magnitude, base);
    if (v.empty() || ec != std::errc{} || p != v.data() + v.size()) {
      throw ParseError(st.line, "malformed immediate '" + s + "'");
    }
    // Hex literals may spell any 32-bit pattern; decimals must fit int32.
    const std::uint64_t limit = base == 16 && !negative ? 0xFFFFFFFFull
                                : negative              ? 0x80000000ull
                                                        : 0x7FFFFFFFull;
    if (magnitude > limit) {
      throw ParseError(st.line, "immediate '" + s + "' does not fit 32 bits");
    }
    auto bits = static_cast<std::uint32_t>(magnitude);
    if (negative) bits = ~bits + 1u;
    return static_cast<std::int32_t>(bits);
  }

  float fimm(const Statement& st, const std::string& s) const {
    float value = 0.0f;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    auto [p, ec] = std::from_chars(first, s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size() ||
        !std::isfinite(value)) {
      throw ParseError(st.line, "malformed float immediate '" + s + "'");
    }
    return value;
  }

  Operand operand(const Statement& st, const std::string& s) const {
    if (looks_numeric(s)) return imm(st, s);
    return reg(st, s);
  }

  Address target(const Statement& st, const std::string& s) const {
    auto it = labels_.find(s);
    if (it == labels_.end()) throw ParseError(st.line, "unresolved label '" + s + "'");
    return it->second;
  }

  Instruction assemble(const Statement& st, Address address) const {
    std::string name = st.mnemonic;
    bool pop_bit = false;
    static const std::vector<std::string> known = {
        "SSY", "BRA", "NOP", "IADD", "FADD32I", "ISETP.LT",
        "MOV", "CLOCK", "STORE_SLOT", "EXIT"};
    auto is_known = [&](const std::string& m) {
      return std::find(known.begin(), known.end(), m) != known.end();
    };
    if (!is_known(name) && name.size() > 2 && name.ends_with(".S") &&
        is_known(name.substr(0, name.size() - 2))) {
      name.resize(name.size() - 2);
      pop_bit = true;
    }
    if (!is_known(name)) throw ParseError(st.line, "unknown mnemonic '" + st.mnemonic + "'");
    if (st.guard && name != "BRA") {
      throw ParseError(st.line, "only BRA may be predicated");
    }
    if (pop_bit && (name == "SSY" || name == "BRA")) {
      throw ParseError(st.line, name + " cannot carry the .S pop-bit");
    }

    const auto& ops = st.operands;
    auto expect = [&](std::size_t n) {
      if (ops.size() != n) {
        throw ParseError(st.line, name + " expects " + std::to_string(n) +
                                      " operand(s), got " + std::to_string(ops.size()));
      }
    };

    Opcode opcode;
    if (name == "SSY") {
      expect(1);
      opcode = op::Ssy{target(st, ops[0])};
    } else if (name == "BRA") {
      expect(1);
      opcode = op::Bra{target(st, ops[0]), st.guard ? pred(st, *st.guard) : Pred::always()};
    } else if (name == "NOP") {
      expect(0);
      opcode = op::Nop{};
    } else if (name == "IADD") {
      expect(3);
      opcode = op::Iadd{reg(st, ops[0]), reg(st, ops[1]), operand(st, ops[2])};
    } else if (name == "FADD32I") {
      expect(3);
      opcode = op::FaddImm{reg(st, ops[0]), reg(st, ops[1]), fimm(st, ops[2])};
    } else if (name == "ISETP.LT") {
      expect(3);
      opcode = op::IsetpLt{pred(st, ops[0]), reg(st, ops[1]), operand(st, ops[2])};
    } else if (name == "MOV") {
      expect(2);
      opcode = op::Mov{reg(st, ops[0]), operand(st, ops[1])};
    } else if (name == "CLOCK") {
      expect(1);
      opcode = op::Clock{reg(st, ops[0])};
    } else if (name == "STORE_SLOT") {
      expect(2);
      opcode = op::StoreSlot{operand(st, ops[0]), reg(st, ops[1])};
    } else {
      expect(0);
      opcode = op::Exit{};
    }
    return Instruction{std::move(opcode), pop_bit, address};
  }

  std::string_view text_;
  std::vector<Statement> statements_;
  std::map<std::string, Address> labels_;
  std::map<std::string, int> label_lines_;
  std::map<std::string, Reg> aliases_;
  unsigned num_registers_ = Program::kDefaultRegisters;
  unsigned num_predicates_ = Program::kDefaultPredicates;
  int last_line_ = 0;
};

std::string reg_text(Reg r) {
  return r.is_zero() ? "RZ" : "R" + std::to_string(r.index);
}

std::string pred_text(Pred p) {
  return p.is_true() ? "PT" : "P" + std::to_string(p.index);
}

std::string operand_text(const Operand& o) {
  if (const auto* r = std::get_if<Reg>(&o)) return reg_text(*r);
  return std::to_string(std::get<std::int32_t>(o));
}

std::string float_text(float f) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, f);
  std::string s(buf, p);
  // Keep a decimal point so the literal reads as a float.
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

std::string format_program(const Program& program) {
  std::map<Address, std::vector<std::string>> names;
  for (const auto& [name, address] : program.labels()) {
    names[address].push_back(name);
  }
  // Unlabeled targets get a synthetic label.
  for (const Instruction& ins : program.instructions()) {
    if (auto t = target_of(ins.opcode); t && !names.count(*t)) {
      names[*t].push_back("L" + std::to_string(*t));
    }
  }
  auto label_of = [&](Address a) { return names.at(a).front(); };

  std::ostringstream out;
  out << ".registers " << program.num_registers() << '\n';
  out << ".predicates " << program.num_predicates() << '\n';
  for (const auto& [name, reg] : program.aliases()) {
    out << ".alias " << name << ' ' << reg_text(reg) << '\n';
  }
  for (const Instruction& ins : program.instructions()) {
    if (auto it = names.find(ins.address); it != names.end()) {
      for (const auto& n : it->second) out << n << ":\n";
    }
    std::string head(mnemonic(kind_of(ins.opcode)));
    if (ins.pop_bit) head += ".S";
    std::string guard;
    std::string operands = std::visit(
        Overloaded{
            [&](const op::Ssy& o) { return label_of(o.target); },
            [&](const op::Bra& o) {
              if (!o.pred.is_true()) guard = "@" + pred_text(o.pred) + " ";
              return label_of(o.target);
            },
            [](const op::Nop&) { return std::string(); },
            [](const op::Iadd& o) {
              return reg_text(o.dst) + ", " + reg_text(o.a) + ", " + operand_text(o.b);
            },
            [](const op::FaddImm& o) {
              return reg_text(o.dst) + ", " + reg_text(o.src) + ", " + float_text(o.imm);
            },
            [](const op::IsetpLt& o) {
              return pred_text(o.dst) + ", " + reg_text(o.a) + ", " + operand_text(o.b);
            },
            [](const op::Mov& o) { return reg_text(o.dst) + ", " + operand_text(o.src); },
            [](const op::Clock& o) { return reg_text(o.dst); },
            [](const op::StoreSlot& o) {
              return operand_text(o.slot) + ", " + reg_text(o.src);
            },
            [](const op::Exit&) { return std::string(); },
        },
        ins.opcode);
    out << "        " << guard << head;
    if (!operands.empty()) out << ' ' << operands;
    out << '\n';
  }
  return out.str();
}

}  // namespace simtdiv
