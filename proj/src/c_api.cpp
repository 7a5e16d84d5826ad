#include "simtdiv/simtdiv.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "simtdiv/cost_model.hpp"
#include "simtdiv/error.hpp"
#include "simtdiv/harness.hpp"
#include "simtdiv/isa.hpp"
#include "simtdiv/kernels.hpp"
#include "simtdiv/warp.hpp"

struct simtdiv_program {
  simtdiv::Program program;
};

struct simtdiv_profile {
  simtdiv::ArchProfile profile;
};

struct simtdiv_launch {
  simtdiv::LaunchConfig config;
};

struct simtdiv_result {
  simtdiv::RunResult result;
  simtdiv::Program program;  // for register-name resolution
};

namespace {

thread_local std::string g_last_error;

simtdiv_status fail(simtdiv_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
simtdiv_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const simtdiv::ParseError& e) {
    return fail(SIMTDIV_ERR_PARSE, e.what());
  } catch (const simtdiv::ProgramError& e) {
    return fail(SIMTDIV_ERR_PROGRAM, e.what());
  } catch (const simtdiv::ModelError& e) {
    return fail(SIMTDIV_ERR_MODEL, e.what());
  } catch (const simtdiv::BudgetExceeded& e) {
    return fail(SIMTDIV_ERR_BUDGET, e.what());
  } catch (const simtdiv::ConfigError& e) {
    return fail(SIMTDIV_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SIMTDIV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SIMTDIV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SIMTDIV_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bool to_kernel(simtdiv_kernel k, simtdiv::KernelId* out) {
  switch (k) {
    case SIMTDIV_KERNEL_SINGLE_LOOP: *out = simtdiv::KernelId::kSingleLoop; return true;
    case SIMTDIV_KERNEL_DOUBLE_LOOP: *out = simtdiv::KernelId::kDoubleLoop; return true;
    case SIMTDIV_KERNEL_SINGLE_LOOP_INSTRUMENTED:
      *out = simtdiv::KernelId::kSingleLoopInstrumented;
      return true;
  }
  return false;
}

bool to_format(simtdiv_format f, simtdiv::OutputFormat* out) {
  switch (f) {
    case SIMTDIV_FORMAT_CSV: *out = simtdiv::OutputFormat::kCsv; return true;
    case SIMTDIV_FORMAT_JSONL: *out = simtdiv::OutputFormat::kJsonl; return true;
  }
  return false;
}

simtdiv_status bad_arg(const char* what) {
  return fail(SIMTDIV_ERR_INVALID_ARGUMENT, what);
}

bool read_file(const char* path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  *out = buf.str();
  return true;
}

}  // namespace

extern "C" {

const char* simtdiv_version(void) { return "1.0.0"; }

const char* simtdiv_last_error(void) { return g_last_error.c_str(); }

const char* simtdiv_status_name(simtdiv_status status) {
  switch (status) {
    case SIMTDIV_OK: return "ok";
    case SIMTDIV_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SIMTDIV_ERR_PARSE: return "parse error";
    case SIMTDIV_ERR_PROGRAM: return "invalid program";
    case SIMTDIV_ERR_MODEL: return "model violation";
    case SIMTDIV_ERR_BUDGET: return "instruction budget exceeded";
    case SIMTDIV_ERR_CONFIG: return "configuration error";
    case SIMTDIV_ERR_IO: return "i/o error";
    case SIMTDIV_ERR_NOT_FOUND: return "not found";
    case SIMTDIV_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void simtdiv_string_free(char* str) { std::free(str); }

simtdiv_status simtdiv_kernel_from_name(const char* name, simtdiv_kernel* out) {
  if (name == nullptr || out == nullptr) return bad_arg("null argument");
  auto id = simtdiv::parse_kernel_id(name);
  if (!id) return fail(SIMTDIV_ERR_NOT_FOUND, std::string("unknown kernel '") + name + "'");
  *out = static_cast<simtdiv_kernel>(*id);
  return SIMTDIV_OK;
}

const char* simtdiv_kernel_name(simtdiv_kernel kernel) {
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return nullptr;
  return simtdiv::kernel_name(id).data();
}

// ---------------------------------------------------------------------------

simtdiv_status simtdiv_program_builtin(simtdiv_kernel kernel, simtdiv_program** out) {
  if (out == nullptr) return bad_arg("null out pointer");
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  return guarded([&] {
    *out = new simtdiv_program{simtdiv::kernel_program(id)};
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_program_parse(const char* text, simtdiv_program** out) {
  if (text == nullptr || out == nullptr) return bad_arg("null argument");
  return guarded([&] {
    *out = new simtdiv_program{simtdiv::parse_program(text)};
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_program_load(const char* path, simtdiv_program** out) {
  if (path == nullptr || out == nullptr) return bad_arg("null argument");
  std::string text;
  if (!read_file(path, &text)) {
    return fail(SIMTDIV_ERR_IO, std::string("cannot read program file ") + path);
  }
  return simtdiv_program_parse(text.c_str(), out);
}

simtdiv_status simtdiv_program_format(const simtdiv_program* program, char** out) {
  if (program == nullptr || out == nullptr) return bad_arg("null argument");
  return guarded([&] {
    *out = dup_string(simtdiv::format_program(program->program));
    return SIMTDIV_OK;
  });
}

size_t simtdiv_program_size(const simtdiv_program* program) {
  return program == nullptr ? 0 : program->program.size();
}

void simtdiv_program_free(simtdiv_program* program) { delete program; }

// ---------------------------------------------------------------------------

simtdiv_status simtdiv_profile_builtin(const char* name, simtdiv_profile** out) {
  if (name == nullptr || out == nullptr) return bad_arg("null argument");
  auto profile = simtdiv::builtin_profile(name);
  if (!profile) {
    return fail(SIMTDIV_ERR_NOT_FOUND, std::string("unknown profile '") + name + "'");
  }
  return guarded([&] {
    *out = new simtdiv_profile{std::move(*profile)};
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_profile_parse(const char* text, simtdiv_profile** out) {
  if (text == nullptr || out == nullptr) return bad_arg("null argument");
  return guarded([&] {
    *out = new simtdiv_profile{simtdiv::parse_profile(text)};
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_profile_load(const char* path, simtdiv_profile** out) {
  if (path == nullptr || out == nullptr) return bad_arg("null argument");
  std::string text;
  if (!read_file(path, &text)) {
    return fail(SIMTDIV_ERR_IO, std::string("cannot read profile file ") + path);
  }
  return simtdiv_profile_parse(text.c_str(), out);
}

simtdiv_status simtdiv_profile_set_stack_capacity(simtdiv_profile* profile,
                                                  uint64_t capacity) {
  if (profile == nullptr) return bad_arg("null profile");
  return guarded([&] {
    simtdiv::ArchProfile updated = profile->profile;
    updated.phys_capacity =
        capacity == 0 ? simtdiv::kUnboundedCapacity : static_cast<std::size_t>(capacity);
    updated.validate();
    profile->profile = std::move(updated);
    return SIMTDIV_OK;
  });
}

const char* simtdiv_profile_name(const simtdiv_profile* profile) {
  return profile == nullptr ? nullptr : profile->profile.name.c_str();
}

void simtdiv_profile_free(simtdiv_profile* profile) { delete profile; }

// ---------------------------------------------------------------------------

simtdiv_status simtdiv_launch_create(const simtdiv_profile* profile,
                                     simtdiv_launch** out) {
  if (profile == nullptr || out == nullptr) return bad_arg("null argument");
  return guarded([&] {
    auto* launch = new simtdiv_launch{};
    launch->config.profile = profile->profile;
    *out = launch;
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_launch_set_register(simtdiv_launch* launch, const char* name,
                                           const int32_t* values) {
  if (launch == nullptr || name == nullptr || values == nullptr) {
    return bad_arg("null argument");
  }
  return guarded([&] {
    launch->config.registers[name].assign(values, values + SIMTDIV_WARP_SIZE);
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_launch_set_bound_pattern(simtdiv_launch* launch,
                                                const char* name, int n) {
  if (launch == nullptr || name == nullptr) return bad_arg("null argument");
  return guarded([&] {
    const auto pattern = simtdiv::bound_pattern(n);
    launch->config.registers[name].assign(pattern.bounds.begin(), pattern.bounds.end());
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_launch_set_kernel_bounds(simtdiv_launch* launch,
                                                simtdiv_kernel kernel, int n) {
  if (launch == nullptr) return bad_arg("null launch");
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  return guarded([&] {
    auto configured = simtdiv::kernel_launch(id, simtdiv::bound_pattern(n));
    for (auto& [name, values] : configured.registers) {
      launch->config.registers[name] = std::move(values);
    }
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_launch_set_mask(simtdiv_launch* launch, uint32_t mask) {
  if (launch == nullptr) return bad_arg("null launch");
  if (mask == 0) return fail(SIMTDIV_ERR_CONFIG, "launch mask must enable a lane");
  launch->config.launch_mask = mask;
  return SIMTDIV_OK;
}

simtdiv_status simtdiv_launch_set_budget(simtdiv_launch* launch, uint64_t budget) {
  if (launch == nullptr) return bad_arg("null launch");
  if (budget == 0) return fail(SIMTDIV_ERR_CONFIG, "instruction budget must be positive");
  launch->config.instruction_budget = budget;
  return SIMTDIV_OK;
}

simtdiv_status simtdiv_launch_set_record_trace(simtdiv_launch* launch, int enable) {
  if (launch == nullptr) return bad_arg("null launch");
  launch->config.record_trace = enable != 0;
  return SIMTDIV_OK;
}

void simtdiv_launch_free(simtdiv_launch* launch) { delete launch; }

// ---------------------------------------------------------------------------

simtdiv_status simtdiv_run(const simtdiv_program* program, const simtdiv_launch* launch,
                           simtdiv_result** out) {
  if (program == nullptr || launch == nullptr || out == nullptr) {
    return bad_arg("null argument");
  }
  return guarded([&] {
    auto result = simtdiv::run(program->program, launch->config);
    *out = new simtdiv_result{std::move(result), program->program};
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_result_counters(const simtdiv_result* result,
                                       simtdiv_counters* out) {
  if (result == nullptr || out == nullptr) return bad_arg("null argument");
  const auto& r = result->result;
  const auto& ev = r.counters.events;
  *out = simtdiv_counters{};
  out->sync_pushes = ev.sync_pushes;
  out->div_pushes = ev.div_pushes;
  out->sync_pops = ev.sync_pops;
  out->div_pops = ev.div_pops;
  out->spill_stores = ev.spill_stores;
  out->spill_loads = ev.spill_loads;
  out->executed_instructions = r.counters.executed_instructions;
  out->executed_branches = r.counters.executed_branches;
  out->max_depth = r.max_depth;
  out->total_cycles = r.total_cycles;
  out->final_mask = r.final_mask;
  return SIMTDIV_OK;
}

simtdiv_status simtdiv_result_register(const simtdiv_result* result, unsigned lane,
                                       const char* name, uint32_t* out_bits) {
  if (result == nullptr || name == nullptr || out_bits == nullptr) {
    return bad_arg("null argument");
  }
  if (lane >= SIMTDIV_WARP_SIZE) return bad_arg("lane out of range");
  auto reg = result->program.resolve_register(name);
  if (!reg) return fail(SIMTDIV_ERR_NOT_FOUND, std::string("unknown register '") + name + "'");
  *out_bits = static_cast<uint32_t>(result->result.int_reg(lane, *reg));
  return SIMTDIV_OK;
}

size_t simtdiv_result_depth_history(const simtdiv_result* result, uint64_t* ordinals,
                                    uint64_t* depths, size_t capacity) {
  if (result == nullptr) return 0;
  const auto& history = result->result.depth_history;
  for (size_t i = 0; i < history.size() && i < capacity; ++i) {
    if (ordinals != nullptr) ordinals[i] = history[i].ordinal;
    if (depths != nullptr) depths[i] = history[i].depth;
  }
  return history.size();
}

simtdiv_status simtdiv_result_overhead(const simtdiv_result* result,
                                       const simtdiv_profile* profile, uint64_t* out) {
  if (result == nullptr || profile == nullptr || out == nullptr) {
    return bad_arg("null argument");
  }
  *out = simtdiv::charge(result->result.counters.events, profile->profile);
  return SIMTDIV_OK;
}

simtdiv_status simtdiv_result_predict(const simtdiv_result* result,
                                      simtdiv_kernel kernel,
                                      const simtdiv_profile* profile, uint64_t* out) {
  if (result == nullptr || profile == nullptr || out == nullptr) {
    return bad_arg("null argument");
  }
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  if (!profile->profile.base_for(simtdiv::kernel_name(id))) {
    return fail(SIMTDIV_ERR_NOT_FOUND, "profile '" + profile->profile.name +
                                           "' has no base cycles for kernel '" +
                                           std::string(simtdiv::kernel_name(id)) + "'");
  }
  return guarded([&] {
    *out = simtdiv::predict_total(id, profile->profile, result->result);
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_result_trace(const simtdiv_result* result, simtdiv_format format,
                                    char** out) {
  if (result == nullptr || out == nullptr) return bad_arg("null argument");
  simtdiv::OutputFormat fmt{};
  if (!to_format(format, &fmt)) return bad_arg("unknown format");
  return guarded([&] {
    std::ostringstream buf;
    simtdiv::emit_trace(result->result, buf, fmt);
    *out = dup_string(buf.str());
    return SIMTDIV_OK;
  });
}

void simtdiv_result_free(simtdiv_result* result) { delete result; }

// ---------------------------------------------------------------------------

simtdiv_status simtdiv_expected_push_count(simtdiv_kernel kernel, int n, uint64_t* out) {
  if (out == nullptr) return bad_arg("null out pointer");
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  return guarded([&] {
    *out = simtdiv::expected_push_count(id, n);
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_expected_max_depth(simtdiv_kernel kernel, int n, uint64_t* out) {
  if (out == nullptr) return bad_arg("null out pointer");
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  return guarded([&] {
    *out = simtdiv::expected_max_depth(id, n);
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_fit_curve(simtdiv_kernel kernel, const char* arch, int n,
                                 int64_t* out) {
  if (arch == nullptr || out == nullptr) return bad_arg("null argument");
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  return guarded([&] {
    auto fit = simtdiv::fit_curve(id, arch, n);
    if (!fit) {
      return fail(SIMTDIV_ERR_NOT_FOUND, "no published fit for kernel '" +
                                             std::string(simtdiv::kernel_name(id)) +
                                             "' on '" + arch + "'");
    }
    *out = *fit;
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_sweep(simtdiv_kernel kernel, const simtdiv_profile* profile,
                             int first, int last, simtdiv_format format, char** out) {
  if (profile == nullptr || out == nullptr) return bad_arg("null argument");
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  simtdiv::OutputFormat fmt{};
  if (!to_format(format, &fmt)) return bad_arg("unknown format");
  return guarded([&] {
    const auto rows = simtdiv::sweep(id, profile->profile, {first, last});
    std::ostringstream buf;
    simtdiv::write_rows(buf, rows, fmt);
    *out = dup_string(buf.str());
    return SIMTDIV_OK;
  });
}

simtdiv_status simtdiv_compare(simtdiv_kernel kernel, const simtdiv_profile* profile,
                               int first, int last, char** report, int* passed) {
  if (profile == nullptr || report == nullptr || passed == nullptr) {
    return bad_arg("null argument");
  }
  simtdiv::KernelId id{};
  if (!to_kernel(kernel, &id)) return bad_arg("unknown kernel id");
  return guarded([&] {
    const simtdiv::NRange range{first, last};
    const auto rows = simtdiv::sweep(id, profile->profile, range);
    const auto oracles = simtdiv::OracleSet::build(id, profile->profile.name, range);
    const auto result = simtdiv::compare(rows, oracles);
    *report = dup_string(result.to_text());
    *passed = result.passed() ? 1 : 0;
    return SIMTDIV_OK;
  });
}

}  // extern "C"
