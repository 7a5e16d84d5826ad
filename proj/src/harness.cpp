#include "simtdiv/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "simtdiv/error.hpp"

namespace simtdiv {
namespace {

void check_n(int n) {
  if (n < 0 || n > kMaxDivergent) {
    throw ConfigError("n=" + std::to_string(n) + " outside 0..31");
  }
}

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError("malformed n-range '" + std::string(whole) + "'");
  }
  return v;
}

SweepRow measure(KernelId kernel, const ArchProfile& profile, int n) {
  const RunResult result =
      run(kernel_program(kernel), kernel_launch(kernel, bound_pattern(n), profile));
  const EventCounts& ev = result.counters.events;

  SweepRow row;
  row.n = n;
  row.kernel = kernel;
  row.arch = profile.name;
  row.div_pushes = ev.div_pushes;
  row.total_pushes = ev.pushes();
  row.div_pops = ev.div_pops;
  row.max_depth = result.max_depth;
  row.spill_stores = ev.spill_stores;
  row.spill_loads = ev.spill_loads;
  row.extra_branches = ev.spill_stores;
  row.overhead_cycles = charge(ev, profile);
  const auto base = profile.base_for(kernel_name(kernel));
  row.base_known = base.has_value();
  row.predicted_cycles = base.value_or(0) + row.overhead_cycles;
  row.oracle_cycles = fit_curve(kernel, profile.name, n);
  if (row.oracle_cycles) {
    const auto predicted = static_cast<std::int64_t>(row.predicted_cycles);
    row.abs_diff = static_cast<std::uint64_t>(
        predicted > *row.oracle_cycles ? predicted - *row.oracle_cycles
                                       : *row.oracle_cycles - predicted);
  }
  return row;
}

std::string hex_mask(LaneMask mask) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", mask);
  return buf;
}

std::string event_text(const StepEvents& events) {
  std::string out;
  for (CostEvent e : events) {
    if (!out.empty()) out += '+';
    out += cost_event_name(e);
  }
  return out;
}

std::string opcode_text(const StepRecord& rec) {
  std::string s(mnemonic(rec.kind));
  if (rec.pop_bit) s += ".S";
  return s;
}

}  // namespace

NRange parse_n_range(std::string_view text) {
  NRange range;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    range.first = parse_int(text.substr(0, dots), text);
    range.last = parse_int(text.substr(dots + 2), text);
  } else {
    range.first = range.last = parse_int(text, text);
  }
  validate(range);
  return range;
}

void validate(const NRange& range) {
  if (range.first < 0 || range.last > kMaxDivergent || range.first > range.last) {
    throw ConfigError("n-range " + std::to_string(range.first) + ".." +
                      std::to_string(range.last) + " not within 0..31");
  }
}

std::vector<SweepRow> sweep(KernelId kernel, const ArchProfile& profile, NRange range) {
  validate(range);
  profile.validate();
  std::vector<std::future<SweepRow>> pending;
  pending.reserve(range.size());
  for (int n = range.first; n <= range.last; ++n) {
    pending.push_back(std::async(std::launch::async, measure, kernel,
                                 std::cref(profile), n));
  }
  std::vector<SweepRow> rows;
  rows.reserve(pending.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

std::uint64_t expected_push_count(KernelId kernel, int n) {
  check_n(n);
  const auto x = static_cast<std::uint64_t>(n);
  if (kernel == KernelId::kDoubleLoop) return x * (65 - x) / 2 + 33;
  return x + 1;
}

std::size_t expected_max_depth(KernelId kernel, int n) {
  check_n(n);
  return static_cast<std::size_t>(n) + (kernel == KernelId::kDoubleLoop ? 2 : 1);
}

std::optional<std::int64_t> fit_curve(KernelId kernel, std::string_view arch, int n) {
  check_n(n);
  if (arch != "kepler") return std::nullopt;
  const std::int64_t x = n;
  switch (kernel) {
    case KernelId::kSingleLoop: return 1732 + 32 * x;
    case KernelId::kDoubleLoop: return -16 * x * x + 1040 * x + 57024;
    case KernelId::kSingleLoopInstrumented: return std::nullopt;
  }
  return std::nullopt;
}

OracleSet OracleSet::build(KernelId kernel, std::string_view arch, NRange range) {
  validate(range);
  OracleSet set;
  set.kernel = kernel;
  set.arch = std::string(arch);
  set.range = range;
  for (int n = range.first; n <= range.last; ++n) {
    set.rows.push_back({n, expected_push_count(kernel, n),
                        expected_max_depth(kernel, n), fit_curve(kernel, arch, n)});
  }
  return set;
}

CompareReport compare(std::span<const SweepRow> rows, const OracleSet& oracles) {
  if (rows.size() != oracles.rows.size() ||
      !std::equal(rows.begin(), rows.end(), oracles.rows.begin(),
                  [](const SweepRow& r, const OracleRow& o) { return r.n == o.n; })) {
    throw ConfigError("sweep rows and oracle set cover different n");
  }
  CompareReport report;
  report.kernel = oracles.kernel;
  report.arch = oracles.arch;
  report.range = oracles.range;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    const OracleRow& oracle = oracles.rows[i];
    ComparedRow c;
    c.n = row.n;
    c.spill_region = row.spill_stores > 0;
    c.total_pushes = row.total_pushes;
    c.expected_pushes = oracle.push_count;
    c.max_depth = row.max_depth;
    c.expected_max_depth = oracle.max_depth;
    c.predicted_cycles = row.predicted_cycles;
    c.oracle_cycles = oracle.fit_cycles;
    const std::string at = "n=" + std::to_string(row.n) + ": ";
    if (c.total_pushes != c.expected_pushes) {
      report.failures.push_back(at + "total pushes " + std::to_string(c.total_pushes) +
                                " != " + std::to_string(c.expected_pushes));
    }
    if (c.max_depth != c.expected_max_depth) {
      report.failures.push_back(at + "max depth " + std::to_string(c.max_depth) +
                                " != " + std::to_string(c.expected_max_depth));
    }
    if (c.oracle_cycles) {
      const auto predicted = static_cast<std::int64_t>(c.predicted_cycles);
      const auto diff = static_cast<std::uint64_t>(std::abs(predicted - *c.oracle_cycles));
      c.abs_diff = diff;
      report.max_abs_diff = std::max(report.max_abs_diff, diff);
      if (*c.oracle_cycles != 0) {
        report.max_rel_diff =
            std::max(report.max_rel_diff,
                     static_cast<double>(diff) / static_cast<double>(*c.oracle_cycles));
      }
      if (!c.spill_region) {
        report.max_abs_diff_exact_region =
            std::max(report.max_abs_diff_exact_region, diff);
        if (diff != 0) {
          report.failures.push_back(at + "predicted " + std::to_string(predicted) +
                                    " != fit " + std::to_string(*c.oracle_cycles) +
                                    " in the no-spill region");
        }
      }
    }
    report.rows.push_back(c);
  }
  return report;
}

std::string CompareReport::to_text() const {
  std::ostringstream out;
  out << "compare kernel=" << kernel_name(kernel) << " arch=" << arch
      << " n=" << range.first << ".." << range.last << '\n';
  out << std::setw(3) << "n" << std::setw(8) << "region" << std::setw(8) << "pushes"
      << std::setw(10) << "expected" << std::setw(7) << "depth" << std::setw(10)
      << "expected" << std::setw(11) << "predicted" << std::setw(9) << "oracle"
      << std::setw(6) << "diff" << '\n';
  for (const ComparedRow& r : rows) {
    out << std::setw(3) << r.n << std::setw(8) << (r.spill_region ? "spill" : "exact")
        << std::setw(8) << r.total_pushes << std::setw(10) << r.expected_pushes
        << std::setw(7) << r.max_depth << std::setw(10) << r.expected_max_depth
        << std::setw(11) << r.predicted_cycles << std::setw(9)
        << (r.oracle_cycles ? std::to_string(*r.oracle_cycles) : "-") << std::setw(6)
        << (r.abs_diff ? std::to_string(*r.abs_diff) : "-") << '\n';
  }
  out << "max_abs_diff_exact_region=" << max_abs_diff_exact_region << '\n';
  out << "max_abs_diff=" << max_abs_diff << '\n';
  out << "max_rel_diff=" << std::fixed << std::setprecision(6) << max_rel_diff << '\n';
  for (const auto& f : failures) out << "FAIL " << f << '\n';
  out << "result=" << (passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "jsonl") return OutputFormat::kJsonl;
  return std::nullopt;
}

void write_rows(std::ostream& out, std::span<const SweepRow> rows, OutputFormat format) {
  if (format == OutputFormat::kCsv) {
    out << "n,kernel,arch,div_pushes,total_pushes,max_depth,spills,extra_branches,"
           "predicted_cycles,oracle_cycles,diff\n";
    for (const SweepRow& r : rows) {
      out << r.n << ',' << kernel_name(r.kernel) << ',' << r.arch << ','
          << r.div_pushes << ',' << r.total_pushes << ',' << r.max_depth << ','
          << r.spill_stores << ',' << r.extra_branches << ',' << r.predicted_cycles
          << ',';
      if (r.oracle_cycles) out << *r.oracle_cycles;
      out << ',';
      if (r.abs_diff) out << *r.abs_diff;
      out << '\n';
    }
  } else {
    for (const SweepRow& r : rows) {
      nlohmann::ordered_json j;
      j["n"] = r.n;
      j["kernel"] = kernel_name(r.kernel);
      j["arch"] = r.arch;
      j["div_pushes"] = r.div_pushes;
      j["total_pushes"] = r.total_pushes;
      j["max_depth"] = r.max_depth;
      j["spills"] = r.spill_stores;
      j["extra_branches"] = r.extra_branches;
      j["predicted_cycles"] = r.predicted_cycles;
      j["oracle_cycles"] = r.oracle_cycles ? nlohmann::ordered_json(*r.oracle_cycles)
                                           : nlohmann::ordered_json(nullptr);
      j["diff"] = r.abs_diff ? nlohmann::ordered_json(*r.abs_diff)
                             : nlohmann::ordered_json(nullptr);
      out << j.dump() << '\n';
    }
  }
  if (!out) throw Error("failed writing sweep rows");
}

void emit_trace(const RunResult& result, std::ostream& out, OutputFormat format) {
  if (result.trace.size() != result.counters.executed_instructions) {
    throw ConfigError("run was not recorded with tracing enabled");
  }
  if (format == OutputFormat::kCsv) {
    out << "ordinal,pc,opcode,active_mask,depth,event,cycle\n";
  }
  for (const StepRecord& rec : result.trace) {
    if (format == OutputFormat::kCsv) {
      out << rec.ordinal << ',' << rec.pc << ',' << opcode_text(rec) << ','
          << hex_mask(rec.mask_after) << ',' << rec.depth_after << ','
          << event_text(rec.events) << ',' << rec.cycle_after << '\n';
    } else {
      nlohmann::ordered_json j;
      j["ordinal"] = rec.ordinal;
      j["pc"] = rec.pc;
      j["opcode"] = opcode_text(rec);
      j["active_mask"] = hex_mask(rec.mask_after);
      j["depth"] = rec.depth_after;
      j["event"] = event_text(rec.events);
      j["cycle"] = rec.cycle_after;
      out << j.dump() << '\n';
    }
  }
  out.flush();
  if (!out) throw Error("failed writing trace");
}

}  // namespace simtdiv
