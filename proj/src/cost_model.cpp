#include "simtdiv/cost_model.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "simtdiv/error.hpp"

namespace simtdiv {

ArchProfile ArchProfile::kepler() {
  ArchProfile p;
  p.name = "kepler";
  p.div_cost = 32;
  p.phys_capacity = 16;
  p.spill_chunk = 4;
  // 84-cycle round trip
  p.spill_store_cost = 40;
  p.spill_load_cost = 44;
  p.base_cycles = {{"single", 1732}, {"double", 57024}};
  return p;
}

ArchProfile ArchProfile::maxwell() {
  ArchProfile p;
  p.name = "maxwell";
  p.div_cost = 26;
  p.phys_capacity = 16;
  p.spill_chunk = 4;
  p.spill_store_cost = 88;
  p.spill_load_cost = 88;
  // no base constants; supply base.<kernel> in a profile file
  return p;
}

std::optional<std::uint64_t> ArchProfile::base_for(std::string_view kernel) const {
  if (auto it = base_cycles.find(std::string(kernel)); it != base_cycles.end()) {
    return it->second;
  }
  return std::nullopt;
}

void ArchProfile::validate() const {
  if (phys_capacity == 0) throw ConfigError("phys_capacity must be positive");
  if (spill_chunk == 0 || spill_chunk > phys_capacity) {
    throw ConfigError("spill_chunk must be in 1..phys_capacity");
  }
}

std::optional<ArchProfile> builtin_profile(std::string_view name) {
  if (name == "kepler") return ArchProfile::kepler();
  if (name == "maxwell") return ArchProfile::maxwell();
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_u64(std::string_view value, int line, std::string_view key) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc{} || p != value.data() + value.size()) {
    throw ConfigError("profile line " + std::to_string(line) + ": " +
                      std::string(key) + " expects a non-negative integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

}  // namespace

ArchProfile parse_profile(std::string_view text) {
  ArchProfile profile;
  bool seen_key = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto c = line.find('#'); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("profile line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));

    if (key == "extends") {
      if (seen_key) {
        throw ConfigError("profile line " + std::to_string(line_no) +
                          ": extends must be the first key");
      }
      auto base = builtin_profile(value);
      if (!base) {
        throw ConfigError("profile line " + std::to_string(line_no) +
                          ": unknown built-in profile '" + std::string(value) + "'");
      }
      profile = *base;
    } else if (key == "name") {
      if (value.empty()) throw ConfigError("profile name must not be empty");
      profile.name = std::string(value);
    } else if (key == "div_cost") {
      profile.div_cost = parse_u64(value, line_no, key);
    } else if (key == "phys_capacity") {
      profile.phys_capacity = value == "unbounded"
                                  ? kUnboundedCapacity
                                  : static_cast<std::size_t>(parse_u64(value, line_no, key));
    } else if (key == "spill_chunk") {
      profile.spill_chunk = static_cast<std::size_t>(parse_u64(value, line_no, key));
    } else if (key == "spill_store_cost") {
      profile.spill_store_cost = parse_u64(value, line_no, key);
    } else if (key == "spill_load_cost") {
      profile.spill_load_cost = parse_u64(value, line_no, key);
    } else if (key == "issue_cycles") {
      profile.issue_cycles = parse_u64(value, line_no, key);
    } else if (key.starts_with("base.") && key.size() > 5) {
      profile.base_cycles[std::string(key.substr(5))] = parse_u64(value, line_no, key);
    } else {
      throw ConfigError("profile line " + std::to_string(line_no) +
                        ": unknown key '" + std::string(key) + "'");
    }
    seen_key = true;
  }
  if (profile.name.empty()) profile.name = "custom";
  profile.validate();
  return profile;
}

ArchProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_profile(buf.str());
}

std::string format_profile(const ArchProfile& p) {
  std::ostringstream out;
  out << "name = " << p.name << '\n'
      << "div_cost = " << p.div_cost << '\n'
      << "phys_capacity = ";
  if (p.unbounded_stack()) {
    out << "unbounded";
  } else {
    out << p.phys_capacity;
  }
  out << '\n'
      << "spill_chunk = " << p.spill_chunk << '\n'
      << "spill_store_cost = " << p.spill_store_cost << '\n'
      << "spill_load_cost = " << p.spill_load_cost << '\n'
      << "issue_cycles = " << p.issue_cycles << '\n';
  for (const auto& [kernel, cycles] : p.base_cycles) {
    out << "base." << kernel << " = " << cycles << '\n';
  }
  return out.str();
}

void EventCounts::add(CostEvent event) {
  switch (event) {
    case CostEvent::kSyncPush: ++sync_pushes; break;
    case CostEvent::kDivPush: ++div_pushes; break;
    case CostEvent::kSyncPop: ++sync_pops; break;
    case CostEvent::kDivPop: ++div_pops; break;
    case CostEvent::kSpillStore: ++spill_stores; break;
    case CostEvent::kSpillLoad: ++spill_loads; break;
  }
}

void EventCounts::add(std::span<const CostEvent> events) {
  for (CostEvent e : events) add(e);
}

std::uint64_t charge(const EventCounts& events, const ArchProfile& profile) {
  return profile.div_cost * events.div_pops +
         profile.spill_store_cost * events.spill_stores +
         profile.spill_load_cost * events.spill_loads;
}

std::uint64_t charge(std::span<const CostEvent> events, const ArchProfile& profile) {
  EventCounts counts;
  counts.add(events);
  return charge(counts, profile);
}

std::uint64_t predict_total(std::string_view kernel, const ArchProfile& profile,
                            const EventCounts& events) {
  auto base = profile.base_for(kernel);
  if (!base) {
    throw ConfigError("profile '" + profile.name + "' has no base cycles for kernel '" +
                      std::string(kernel) + "'");
  }
  return *base + charge(events, profile);
}

}  // namespace simtdiv
