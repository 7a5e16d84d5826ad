// simtdiv command-line front end. Talks to the emulator only through the C
// API in simtdiv.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simtdiv/simtdiv.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitModel = 2;
constexpr int kExitCompare = 3;

struct ProgramDeleter {
  void operator()(simtdiv_program* p) const { simtdiv_program_free(p); }
};
struct ProfileDeleter {
  void operator()(simtdiv_profile* p) const { simtdiv_profile_free(p); }
};
struct LaunchDeleter {
  void operator()(simtdiv_launch* p) const { simtdiv_launch_free(p); }
};
struct ResultDeleter {
  void operator()(simtdiv_result* p) const { simtdiv_result_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { simtdiv_string_free(p); }
};

using ProgramPtr = std::unique_ptr<simtdiv_program, ProgramDeleter>;
using ProfilePtr = std::unique_ptr<simtdiv_profile, ProfileDeleter>;
using LaunchPtr = std::unique_ptr<simtdiv_launch, LaunchDeleter>;
using ResultPtr = std::unique_ptr<simtdiv_result, ResultDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Carries a process exit code out of nested helpers.
struct CliFailure {
  int code;
};

int exit_code_for(simtdiv_status status) {
  switch (status) {
    case SIMTDIV_ERR_PARSE:
    case SIMTDIV_ERR_PROGRAM:
    case SIMTDIV_ERR_MODEL:
    case SIMTDIV_ERR_BUDGET:
      return kExitModel;
    default:
      return kExitUsage;
  }
}

void check(simtdiv_status status, const std::string& context) {
  if (status == SIMTDIV_OK) return;
  std::cerr << "simtdiv: " << context << ": " << simtdiv_status_name(status);
  const std::string detail = simtdiv_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << '\n';
  throw CliFailure{exit_code_for(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "simtdiv: " << message << '\n';
  throw CliFailure{kExitUsage};
}

struct Options {
  std::string kernel;
  std::string program_file;
  std::string arch = "kepler";
  std::string profile_file;
  std::optional<int> n;
  std::string n_range = "0..31";
  std::vector<std::string> regs;
  std::string bound_reg = "R5";
  std::string out;
  std::string format;
  std::optional<std::uint64_t> budget;
};

simtdiv_kernel kernel_of(const Options& o) {
  simtdiv_kernel k{};
  if (simtdiv_kernel_from_name(o.kernel.c_str(), &k) != SIMTDIV_OK) {
    usage_error("unknown kernel '" + o.kernel + "' (single, double, instrumented)");
  }
  return k;
}

ProfilePtr load_profile(const Options& o) {
  simtdiv_profile* raw = nullptr;
  if (!o.profile_file.empty()) {
    check(simtdiv_profile_load(o.profile_file.c_str(), &raw), "profile file");
  } else {
    check(simtdiv_profile_builtin(o.arch.c_str(), &raw), "arch");
  }
  return ProfilePtr(raw);
}

ProgramPtr load_program(const Options& o) {
  if (o.kernel.empty() == o.program_file.empty()) {
    usage_error("exactly one of --kernel or --program is required");
  }
  simtdiv_program* raw = nullptr;
  if (!o.kernel.empty()) {
    check(simtdiv_program_builtin(kernel_of(o), &raw), "kernel");
  } else {
    check(simtdiv_program_load(o.program_file.c_str(), &raw), o.program_file);
  }
  return ProgramPtr(raw);
}

std::pair<int, int> parse_range(const std::string& text) {
  int first = 0, last = 0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%d..%d%c", &first, &last, &extra) == 2 ||
      (std::sscanf(text.c_str(), "%d%c", &first, &extra) == 1 && (last = first, true))) {
    if (first >= 0 && last <= 31 && first <= last) return {first, last};
  }
  usage_error("--n-range must be A..B within 0..31, got '" + text + "'");
}

std::vector<std::int32_t> parse_values(const std::string& name, const std::string& list) {
  std::vector<std::int32_t> values;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used, 0);
      if (used != item.size() || v < INT32_MIN || v > UINT32_MAX) throw std::out_of_range(item);
      values.push_back(static_cast<std::int32_t>(static_cast<std::uint32_t>(v)));
    } catch (const std::exception&) {
      usage_error("--reg " + name + ": bad value '" + item + "'");
    }
  }
  if (values.size() != SIMTDIV_WARP_SIZE) {
    usage_error("--reg " + name + " needs 32 comma-separated values, got " +
                std::to_string(values.size()));
  }
  return values;
}

LaunchPtr make_launch(const Options& o, const simtdiv_profile* profile) {
  simtdiv_launch* raw = nullptr;
  check(simtdiv_launch_create(profile, &raw), "launch");
  LaunchPtr launch(raw);
  if (o.n) {
    if (!o.kernel.empty()) {
      check(simtdiv_launch_set_kernel_bounds(launch.get(), kernel_of(o), *o.n), "--n");
    } else {
      check(simtdiv_launch_set_bound_pattern(launch.get(), o.bound_reg.c_str(), *o.n),
            "--n");
    }
  }
  for (const std::string& spec : o.regs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) usage_error("--reg expects NAME=v0,...,v31");
    const std::string name = spec.substr(0, eq);
    const auto values = parse_values(name, spec.substr(eq + 1));
    check(simtdiv_launch_set_register(launch.get(), name.c_str(), values.data()), "--reg");
  }
  if (o.budget) check(simtdiv_launch_set_budget(launch.get(), *o.budget), "--budget");
  return launch;
}

simtdiv_format format_of(const Options& o, simtdiv_format fallback) {
  if (o.format.empty()) return fallback;
  if (o.format == "csv") return SIMTDIV_FORMAT_CSV;
  if (o.format == "jsonl") return SIMTDIV_FORMAT_JSONL;
  usage_error("--format must be csv or jsonl");
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) usage_error("failed writing to stdout");
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  file << text;
  file.close();
  if (!file) usage_error("cannot write " + o.out);
}

int cmd_run(const Options& o) {
  if (o.program_file.empty() && !o.n && o.regs.empty()) {
    usage_error("run needs --n or --reg for the loop limits");
  }
  ProfilePtr profile = load_profile(o);
  ProgramPtr program = load_program(o);
  LaunchPtr launch = make_launch(o, profile.get());
  simtdiv_result* raw = nullptr;
  check(simtdiv_run(program.get(), launch.get(), &raw), "run");
  ResultPtr result(raw);

  simtdiv_counters c{};
  check(simtdiv_result_counters(result.get(), &c), "counters");
  std::uint64_t overhead = 0;
  check(simtdiv_result_overhead(result.get(), profile.get(), &overhead), "overhead");

  std::ostringstream out;
  if (!o.kernel.empty()) {
    out << "kernel=" << o.kernel << '\n';
  } else {
    out << "program=" << o.program_file << '\n';
  }
  out << "arch=" << simtdiv_profile_name(profile.get()) << '\n';
  if (o.n) out << "n=" << *o.n << '\n';
  out << "sync_pushes=" << c.sync_pushes << '\n'
      << "div_pushes=" << c.div_pushes << '\n'
      << "total_pushes=" << c.sync_pushes + c.div_pushes << '\n'
      << "pops=" << c.sync_pops + c.div_pops << '\n'
      << "max_depth=" << c.max_depth << '\n'
      << "spill_stores=" << c.spill_stores << '\n'
      << "spill_loads=" << c.spill_loads << '\n'
      << "extra_branches=" << c.spill_stores << '\n'
      << "executed_instructions=" << c.executed_instructions << '\n'
      << "executed_branches=" << c.executed_branches << '\n'
      << "emulated_cycles=" << c.total_cycles << '\n'
      << "overhead_cycles=" << overhead << '\n';

  std::optional<std::uint64_t> predicted;
  if (!o.kernel.empty()) {
    std::uint64_t total = 0;
    const auto status = simtdiv_result_predict(result.get(), kernel_of(o), profile.get(), &total);
    if (status == SIMTDIV_OK) {
      predicted = total;
    } else if (status != SIMTDIV_ERR_NOT_FOUND) {
      check(status, "predict");
    }
  }
  if (predicted) {
    out << "predicted_cycles=" << *predicted << '\n';
  } else {
    out << "predicted_cycles=" << overhead << '\n' << "prediction=overhead-only\n";
  }
  if (predicted && o.n) {
    std::int64_t fit = 0;
    if (simtdiv_fit_curve(kernel_of(o), simtdiv_profile_name(profile.get()), *o.n, &fit) ==
        SIMTDIV_OK) {
      const auto diff = static_cast<std::int64_t>(*predicted) - fit;
      out << "oracle_cycles=" << fit << '\n' << "diff=" << (diff < 0 ? -diff : diff) << '\n';
    }
  }
  emit(o, out.str());
  return kExitOk;
}

int cmd_trace(const Options& o) {
  ProfilePtr profile = load_profile(o);
  ProgramPtr program = load_program(o);
  LaunchPtr launch = make_launch(o, profile.get());
  check(simtdiv_launch_set_record_trace(launch.get(), 1), "trace");
  simtdiv_result* raw = nullptr;
  check(simtdiv_run(program.get(), launch.get(), &raw), "run");
  ResultPtr result(raw);
  char* text = nullptr;
  check(simtdiv_result_trace(result.get(), format_of(o, SIMTDIV_FORMAT_JSONL), &text),
        "trace");
  StringPtr owned(text);
  emit(o, owned.get());
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  if (o.kernel.empty()) usage_error("sweep requires --kernel");
  ProfilePtr profile = load_profile(o);
  const auto [first, last] = parse_range(o.n_range);
  char* text = nullptr;
  check(simtdiv_sweep(kernel_of(o), profile.get(), first, last,
                      format_of(o, SIMTDIV_FORMAT_CSV), &text),
        "sweep");
  StringPtr owned(text);
  emit(o, owned.get());
  return kExitOk;
}

int cmd_compare(const Options& o) {
  if (o.kernel.empty()) usage_error("compare requires --kernel");
  ProfilePtr profile = load_profile(o);
  const auto [first, last] = parse_range(o.n_range);
  char* text = nullptr;
  int passed = 0;
  check(simtdiv_compare(kernel_of(o), profile.get(), first, last, &text, &passed),
        "compare");
  StringPtr owned(text);
  emit(o, owned.get());
  return passed ? kExitOk : kExitCompare;
}

int cmd_dump(const Options& o) {
  ProgramPtr program = load_program(o);
  char* text = nullptr;
  check(simtdiv_program_format(program.get(), &text), "dump");
  StringPtr owned(text);
  emit(o, owned.get());
  return kExitOk;
}

void add_source_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--kernel", o.kernel, "Built-in kernel: single, double, instrumented");
  cmd->add_option("--program", o.program_file, "Assembly file to run instead of a kernel");
}

void add_profile_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--arch", o.arch, "Built-in profile: kepler, maxwell")
      ->capture_default_str();
  cmd->add_option("--profile-file", o.profile_file, "key=value profile file");
}

void add_launch_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "Divergent-thread count; expands to the loop-limit pattern")
      ->check(CLI::Range(0, 31));
  cmd->add_option("--reg", o.regs, "NAME=v0,...,v31 initial per-lane register values");
  cmd->add_option("--bound-reg", o.bound_reg, "Register receiving --n with --program")
      ->capture_default_str();
  cmd->add_option("--budget", o.budget, "Instruction budget");
}

void add_output_options(CLI::App* cmd, Options& o, bool with_format) {
  cmd->add_option("--out", o.out, "Output file (default stdout)");
  if (with_format) cmd->add_option("--format", o.format, "csv or jsonl");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIMT warp-divergence emulator and benchmark harness"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run one simulation and report counters");
  add_source_options(run, o);
  add_profile_options(run, o);
  add_launch_options(run, o);
  add_output_options(run, o, false);

  auto* trace = app.add_subcommand("trace", "Run one simulation and emit its step trace");
  add_source_options(trace, o);
  add_profile_options(trace, o);
  add_launch_options(trace, o);
  add_output_options(trace, o, true);

  auto* sweep = app.add_subcommand("sweep", "Sweep n over a built-in kernel");
  sweep->add_option("--kernel", o.kernel, "Built-in kernel")->required();
  add_profile_options(sweep, o);
  sweep->add_option("--n-range", o.n_range, "A..B")->capture_default_str();
  add_output_options(sweep, o, true);

  auto* compare = app.add_subcommand("compare", "Compare a sweep against closed forms");
  compare->add_option("--kernel", o.kernel, "Built-in kernel")->required();
  add_profile_options(compare, o);
  compare->add_option("--n-range", o.n_range, "A..B")->capture_default_str();
  add_output_options(compare, o, false);

  auto* dump = app.add_subcommand("dump", "Print a program as assembly");
  add_source_options(dump, o);
  add_output_options(dump, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*trace) return cmd_trace(o);
    if (*sweep) return cmd_sweep(o);
    if (*compare) return cmd_compare(o);
    if (*dump) return cmd_dump(o);
  } catch (const CliFailure& f) {
    return f.code;
  }
  return kExitUsage;
}
