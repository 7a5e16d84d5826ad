#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>

#include "oracle.hpp"
#include "simtdiv/error.hpp"
#include "simtdiv/isa.hpp"
#include "simtdiv/kernels.hpp"

using namespace simtdiv;

namespace {

int parse_error_line(const std::string& text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("label resolves to the index of the labelled instruction") {
  const Program p = parse_program(
      "SSY done\n"
      "NOP\n"
      "done: NOP\n"
      "EXIT\n");
  const auto& ssy = std::get<op::Ssy>(p.at(0).opcode);
  CHECK(ssy.target == 2);
  CHECK(p.labels().at("done") == 2);
}

TEST_CASE("predicated branch and pop-bit carrier") {
  const Program p = parse_program(
      "loop: IADD R1, R1, 1\n"
      "@P0 BRA loop\n"
      "NOP.S\n"
      "EXIT\n");
  const Instruction& bra = p.at(1);
  REQUIRE(kind_of(bra.opcode) == OpKind::kBra);
  CHECK(std::get<op::Bra>(bra.opcode).pred == Pred{0});
  CHECK(std::get<op::Bra>(bra.opcode).target == 0);
  CHECK_FALSE(bra.pop_bit);

  CHECK(kind_of(p.at(2).opcode) == OpKind::kNop);
  CHECK(p.at(2).pop_bit);
}

TEST_CASE("addresses are sequential in listing order") {
  const Program p = parse_program(
      "; leading comment\n"
      "\n"
      "a: b: NOP   # trailing\n"
      "MOV R2, 0x10\n"
      "FADD32I R0, R0, -2.5\n"
      "ISETP.lt P1, R2, R3\n"
      "CLOCK R4\n"
      "STORE_SLOT R2, R4\n"
      "EXIT\n");
  for (Address i = 0; i < p.size(); ++i) CHECK(p.at(i).address == i);
  CHECK(p.labels().at("a") == 0);
  CHECK(p.labels().at("b") == 0);
  CHECK(std::get<std::int32_t>(std::get<op::Mov>(p.at(1).opcode).src) == 16);
  CHECK(std::get<op::FaddImm>(p.at(2).opcode).imm == -2.5f);
  CHECK(std::get<op::IsetpLt>(p.at(3).opcode).dst == Pred{1});
}

TEST_CASE("format renders pop-bit as .S and the guard as @P0") {
  const std::string text = format_program(single_loop_program());
  CHECK(text.find("NOP.S") != std::string::npos);
  CHECK(text.find("@P0 BRA") != std::string::npos);
  CHECK(text.find("SSY") != std::string::npos);
}

TEST_CASE("round trip is the identity for every built-in kernel") {
  for (KernelId id : {KernelId::kSingleLoop, KernelId::kDoubleLoop,
                      KernelId::kSingleLoopInstrumented}) {
    CAPTURE(kernel_name(id));
    const Program& p = kernel_program(id);
    const Program again = parse_program(format_program(p));
    CHECK(again == p);
    CHECK(format_program(again) == format_program(p));
  }
}

TEST_CASE("round trip of generated loop nests") {
  for (unsigned depth = 1; depth <= 4; ++depth) {
    const auto nest = oracle::make_loop_nest(depth);
    CHECK(parse_program(format_program(nest.program)) == nest.program);
  }
}

TEST_CASE("float immediates survive formatting exactly") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<float> d(-1e6f, 1e6f);
  for (int i = 0; i < 200; ++i) {
    const float f = d(rng);
    const Program p = ProgramBuilder().fadd_imm(Reg{0}, Reg{0}, f).exit().build();
    const Program q = parse_program(format_program(p));
    CHECK(std::get<op::FaddImm>(q.at(0).opcode).imm == f);
  }
  const Program whole = ProgramBuilder().fadd_imm(Reg{0}, Reg{0}, 3.0f).exit().build();
  CHECK(parse_program(format_program(whole)) == whole);
}

TEST_CASE("parse errors name the offending line") {
  CHECK(parse_error_line("NOP\nFROB R1\nEXIT\n") == 2);
  CHECK(parse_error_line("NOP\nNOP\nBRA nowhere\nEXIT\n") == 3);
  CHECK(parse_error_line("MOV R64, 1\nEXIT\n") == 1);
  CHECK(parse_error_line(".registers 8\nNOP\nIADD R8, R1, 1\nEXIT\n") == 3);
  CHECK(parse_error_line("ISETP.LT P7, R1, 1\nEXIT\n") == 1);
  CHECK(parse_error_line("x: NOP\nx: NOP\nEXIT\n") == 2);
  CHECK(parse_error_line("NOP\n@P0 NOP\nEXIT\n") == 2);
  CHECK(parse_error_line("SSY.S a\na: EXIT\n") == 1);
  CHECK(parse_error_line("MOV R1\nEXIT\n") == 1);
  CHECK(parse_error_line("MOV R1, 99999999999\nEXIT\n") == 1);
  CHECK(parse_error_line("FADD32I R1, R1, nan\nEXIT\n") == 1);
  CHECK(parse_error_line("NOP\n.registers 8\nEXIT\n") == 2);
}

TEST_CASE("structural errors") {
  CHECK_THROWS_AS(parse_program(""), ParseError);
  CHECK_THROWS_AS(parse_program("NOP\n"), ParseError);
  CHECK_THROWS_AS(parse_program("EXIT\nNOP\n"), ParseError);
  CHECK_THROWS_AS(parse_program("EXIT\nend:\n"), ParseError);
  CHECK_THROWS_AS(ProgramBuilder().bra("missing").exit().build(), ProgramError);
  CHECK_THROWS_AS(ProgramBuilder().label("a").nop().label("a").exit().build(), ProgramError);
  CHECK_THROWS_AS(Program({Instruction{op::Ssy{5}, false, 0}, Instruction{op::Exit{}, false, 1}}, {}),
                  ProgramError);
  CHECK_THROWS_AS(Program({Instruction{op::Exit{}, false, 1}}, {}), ProgramError);
}

TEST_CASE("aliases resolve and cannot shadow registers") {
  const Program p = parse_program(".alias M R5\nISETP.LT P0, M, 1\nEXIT\n");
  CHECK(p.resolve_register("M") == Reg{5});
  CHECK(p.resolve_register("R12") == Reg{12});
  CHECK(p.resolve_register("RZ") == Reg::zero());
  CHECK_FALSE(p.resolve_register("R64").has_value());
  CHECK_FALSE(p.resolve_register("Q").has_value());
  CHECK(std::get<op::IsetpLt>(p.at(0).opcode).a == Reg{5});
  CHECK_THROWS_AS(parse_program(".alias R3 R5\nEXIT\n"), ParseError);
}

// Random programs whose labels are attached to random instructions in a
// random order; every target must land on the intended index.
TEST_CASE("random label permutations resolve to in-range targets") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 300; ++round) {
    const int body = std::uniform_int_distribution<int>(1, 24)(rng);
    const int size = body + 1;
    const int nlabels = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<int> where(nlabels);
    for (auto& w : where) w = std::uniform_int_distribution<int>(0, size - 1)(rng);
    std::vector<int> order(nlabels);
    for (int i = 0; i < nlabels; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::string> lines(size);
    std::vector<int> expect(size, -1);
    for (int i = 0; i < body; ++i) {
      const int pick = std::uniform_int_distribution<int>(0, nlabels - 1)(rng);
      const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
      if (kind == 0) {
        lines[i] = "SSY lab" + std::to_string(pick);
        expect[i] = where[pick];
      } else if (kind == 1) {
        lines[i] = "@P0 BRA lab" + std::to_string(pick);
        expect[i] = where[pick];
      } else {
        lines[i] = "NOP";
      }
    }
    lines[body] = "EXIT";
    for (int l : order) {
      lines[where[l]] = "lab" + std::to_string(l) + ": " + lines[where[l]];
    }
    std::string text;
    for (const auto& l : lines) text += l + "\n";

    const Program p = parse_program(text);
    REQUIRE(p.size() == static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
      auto t = target_of(p.at(i).opcode);
      if (expect[i] < 0) {
        CHECK_FALSE(t.has_value());
      } else {
        REQUIRE(t.has_value());
        CHECK(*t == static_cast<Address>(expect[i]));
        CHECK(*t < p.size());
      }
    }
    CHECK(parse_program(format_program(p)) == p);
  }
}
