#pragma once

// Ensemble configuration and its flat `key = value` text form.
//
//   # comment
//   env = invasion
//   variant = full, gamma_only
//   phase_len = 120000
//
// List-valued keys take comma-separated values. Writing a config and parsing
// it back yields an identical struct.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "psmeta/agent.hpp"
#include "psmeta/clip_network.hpp"
#include "psmeta/env/invasion.hpp"
#include "psmeta/env/nship.hpp"
#include "psmeta/error.hpp"
#include "psmeta/meta_control.hpp"

namespace psmeta {

enum class EnvKind : std::uint8_t { Invasion, NShip, Grid };

inline std::string_view to_string(EnvKind k) {
  switch (k) {
    case EnvKind::Invasion:
      return "invasion";
    case EnvKind::NShip:
      return "nship";
    case EnvKind::Grid:
      return "grid";
  }
  return "?";
}

inline std::string_view to_string(InvasionScheduleKind k) {
  switch (k) {
    case InvasionScheduleKind::SinglePhase:
      return "single";
    case InvasionScheduleKind::FixedPeriod:
      return "fixed";
    case InvasionScheduleKind::SuccessThreshold:
      return "threshold";
  }
  return "?";
}

inline std::string_view to_string(PhaseUnit u) { return u == PhaseUnit::Trials ? "trials" : "interactions"; }

struct EnsembleConfig {
  /// Output file stem; the preset id for presets.
  std::string name = "run";
  EnvKind env = EnvKind::Invasion;
  std::vector<AgentVariant> variants{AgentVariant::FullMeta};
  std::size_t n_agents = 1;
  std::uint64_t seed = 1;
  /// Record every stride-th interaction (invasion) or trial (n-ship, grid).
  std::size_t stride = 1;

  // Phase schedule.
  InvasionScheduleKind schedule = InvasionScheduleKind::FixedPeriod;
  /// Invasion: interactions per phase. n-ship: trials (or interactions) per
  /// phase, multiplied by n when scale_by_n. Grid: trials per map.
  std::vector<std::size_t> phase_len{1000};
  /// Invasion: number of phases (phase_len's last entry repeats). 0 = one per phase_len entry.
  std::size_t n_phases = 0;
  double threshold = 0.8;
  /// Hard cap on interactions per agent; 0 = none.
  std::size_t max_interactions = 0;

  std::size_t n_start = 1;
  std::size_t n_end = 1;
  bool scale_by_n = true;
  PhaseUnit phase_unit = PhaseUnit::Trials;

  /// Grid-world phase maps: shipped ids ("a", "b", "c") or file paths.
  std::vector<std::string> maps{"a", "b", "c"};

  /// Fixed (FixedRandomParams) or starting values; one run per listed value.
  std::vector<double> gamma;
  std::vector<double> eta;
  MetaConfig meta;

  /// n values to sweep (n-ship); each run uses n_start = n_end = n.
  std::vector<std::size_t> sweep_n;

  /// Agent whose full trajectory and meta events are written out; -1 = none.
  long trace_agent = -1;

  friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    auto end = s.find(',', begin);
    auto item = trim(s.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
    if (!item.empty()) out.push_back(std::move(item));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& text, std::size_t line, const std::string& key) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text[0] == '+') ++first;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ConfigError("cannot parse '" + text + "' as a number", line, key);
  }
  return value;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_real(values[i], 17);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += values[i];
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace detail

inline void validate(const EnsembleConfig& cfg) {
  if (cfg.name.empty() || cfg.name.find_first_of("/\\ \t") != std::string::npos) {
    throw ConfigError("name must be non-empty and contain no path separators or spaces", 0, "name");
  }
  if (cfg.variants.empty()) throw ConfigError("at least one variant is required", 0, "variant");
  if (cfg.n_agents == 0) throw ConfigError("must be at least 1", 0, "n_agents");
  if (cfg.stride == 0) throw ConfigError("must be at least 1", 0, "stride");
  if (cfg.trace_agent < -1 || (cfg.trace_agent >= 0 && static_cast<std::size_t>(cfg.trace_agent) >= cfg.n_agents)) {
    throw ConfigError("must be -1 or an agent index below n_agents", 0, "trace_agent");
  }
  for (auto v : cfg.phase_len) {
    if (v == 0) throw ConfigError("phase lengths must be positive", 0, "phase_len");
  }
  for (double g : cfg.gamma) {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("values must lie in [0, 1]", 0, "gamma");
  }
  for (double e : cfg.eta) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("values must lie in (0, 1]", 0, "eta");
  }
  if (cfg.meta.n_eta == 0) throw ConfigError("must be at least 1", 0, "n_eta");
  if (cfg.meta.n_gamma == 0) throw ConfigError("must be at least 1", 0, "n_gamma");
  if (!(cfg.meta.c_gamma >= 0.0)) throw ConfigError("must be non-negative", 0, "c_gamma");
  if (!(cfg.meta.gamma_meta >= 0.0 && cfg.meta.gamma_meta <= 1.0)) {
    throw ConfigError("must lie in [0, 1]", 0, "gamma_meta");
  }
  if (cfg.meta.rule_bias && !((*cfg.meta.rule_bias)[0] >= 1.0 && (*cfg.meta.rule_bias)[1] >= 1.0)) {
    throw ConfigError("h-values must be >= 1", 0, "rule_bias");
  }
  switch (cfg.env) {
    case EnvKind::Invasion:
      if (cfg.phase_len.empty() && cfg.schedule != InvasionScheduleKind::SuccessThreshold) {
        throw ConfigError("invasion runs need phase_len", 0, "phase_len");
      }
      if (cfg.schedule == InvasionScheduleKind::SuccessThreshold && cfg.n_phases == 0 && cfg.max_interactions == 0) {
        throw ConfigError("threshold schedules need n_phases or max_interactions", 0, "n_phases");
      }
      break;
    case EnvKind::NShip: {
      if (cfg.n_start == 0 || cfg.n_end < cfg.n_start) throw ConfigError("need 1 <= n_start <= n_end", 0, "n_end");
      const std::size_t phases = cfg.sweep_n.empty() ? cfg.n_end - cfg.n_start + 1 : 1;
      if (cfg.phase_len.size() != 1 && cfg.phase_len.size() != phases) {
        throw ConfigError("give one phase length, or one per n", 0, "phase_len");
      }
      for (auto n : cfg.sweep_n) {
        if (n == 0) throw ConfigError("n must be positive", 0, "sweep_n");
      }
      break;
    }
    case EnvKind::Grid:
      if (cfg.maps.empty()) throw ConfigError("grid runs need at least one map", 0, "maps");
      if (cfg.phase_len.size() != cfg.maps.size()) {
        throw ConfigError("grid runs need one phase length per map", 0, "phase_len");
      }
      break;
  }
}

inline EnsembleConfig parse_config(std::string_view text) {
  EnsembleConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? std::string_view(raw) : std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", lineno);
    if (!seen.insert(key).second) throw ConfigError("duplicate key", lineno, key);

    auto size = [&] { return detail::parse_number<std::size_t>(value, lineno, key); };
    auto real = [&] { return detail::parse_number<double>(value, lineno, key); };
    auto sizes = [&] {
      std::vector<std::size_t> out;
      for (const auto& item : detail::split_list(value)) out.push_back(detail::parse_number<std::size_t>(item, lineno, key));
      return out;
    };
    auto reals = [&] {
      std::vector<double> out;
      for (const auto& item : detail::split_list(value)) out.push_back(detail::parse_number<double>(item, lineno, key));
      return out;
    };
    auto boolean = [&] {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      throw ConfigError("expected true or false, got '" + value + "'", lineno, key);
    };

    if (key == "name") {
      cfg.name = value;
    } else if (key == "env") {
      if (value == "invasion") cfg.env = EnvKind::Invasion;
      else if (value == "nship") cfg.env = EnvKind::NShip;
      else if (value == "grid") cfg.env = EnvKind::Grid;
      else throw ConfigError("expected invasion, nship or grid, got '" + value + "'", lineno, key);
    } else if (key == "variant") {
      cfg.variants.clear();
      for (const auto& item : detail::split_list(value)) {
        auto v = parse_variant(item);
        if (!v) throw ConfigError("unknown variant '" + item + "' (full, gamma_only, fixed)", lineno, key);
        cfg.variants.push_back(*v);
      }
    } else if (key == "n_agents") {
      cfg.n_agents = size();
    } else if (key == "seed") {
      cfg.seed = detail::parse_number<std::uint64_t>(value, lineno, key);
    } else if (key == "stride") {
      cfg.stride = size();
    } else if (key == "schedule") {
      if (value == "fixed") cfg.schedule = InvasionScheduleKind::FixedPeriod;
      else if (value == "threshold") cfg.schedule = InvasionScheduleKind::SuccessThreshold;
      else if (value == "single") cfg.schedule = InvasionScheduleKind::SinglePhase;
      else throw ConfigError("expected fixed, threshold or single, got '" + value + "'", lineno, key);
    } else if (key == "phase_len") {
      cfg.phase_len = sizes();
    } else if (key == "n_phases") {
      cfg.n_phases = size();
    } else if (key == "threshold") {
      cfg.threshold = real();
    } else if (key == "max_interactions") {
      cfg.max_interactions = size();
    } else if (key == "n_start") {
      cfg.n_start = size();
    } else if (key == "n_end") {
      cfg.n_end = size();
    } else if (key == "scale_by_n") {
      cfg.scale_by_n = boolean();
    } else if (key == "phase_unit") {
      if (value == "trials") cfg.phase_unit = PhaseUnit::Trials;
      else if (value == "interactions") cfg.phase_unit = PhaseUnit::Interactions;
      else throw ConfigError("expected trials or interactions, got '" + value + "'", lineno, key);
    } else if (key == "maps") {
      cfg.maps = detail::split_list(value);
    } else if (key == "map_a" || key == "map_b" || key == "map_c") {
      // Shorthand for replacing one shipped layout with a file.
      const std::string id(1, key.back());
      for (auto& m : cfg.maps) {
        if (m == id) m = value;
      }
    } else if (key == "gamma") {
      cfg.gamma = reals();
    } else if (key == "eta") {
      cfg.eta = reals();
    } else if (key == "n_eta") {
      cfg.meta.n_eta = size();
    } else if (key == "n_gamma") {
      cfg.meta.n_gamma = size();
    } else if (key == "c_gamma") {
      cfg.meta.c_gamma = real();
    } else if (key == "gamma_meta") {
      cfg.meta.gamma_meta = real();
    } else if (key == "rule_bias") {
      auto v = reals();
      if (v.size() != 2) throw ConfigError("expected two h-values 'rule_I, rule_II'", lineno, key);
      cfg.meta.rule_bias = std::array<double, 2>{v[0], v[1]};
    } else if (key == "sweep_n") {
      cfg.sweep_n = sizes();
    } else if (key == "trace_agent") {
      cfg.trace_agent = detail::parse_number<long>(value, lineno, key);
    } else {
      throw ConfigError("unknown key", lineno, key);
    }
  }
  validate(cfg);
  return cfg;
}

inline std::string to_config_text(const EnsembleConfig& cfg) {
  std::ostringstream out;
  auto kv = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
  std::vector<std::string> variants;
  for (auto v : cfg.variants) variants.emplace_back(to_string(v));
  kv("name", cfg.name);
  kv("env", std::string(to_string(cfg.env)));
  kv("variant", detail::join(variants));
  kv("n_agents", std::to_string(cfg.n_agents));
  kv("seed", std::to_string(cfg.seed));
  kv("stride", std::to_string(cfg.stride));
  kv("schedule", std::string(to_string(cfg.schedule)));
  kv("phase_len", detail::join(cfg.phase_len));
  kv("n_phases", std::to_string(cfg.n_phases));
  kv("threshold", format_real(cfg.threshold, 17));
  kv("max_interactions", std::to_string(cfg.max_interactions));
  kv("n_start", std::to_string(cfg.n_start));
  kv("n_end", std::to_string(cfg.n_end));
  kv("scale_by_n", cfg.scale_by_n ? "true" : "false");
  kv("phase_unit", std::string(to_string(cfg.phase_unit)));
  kv("maps", detail::join(cfg.maps));
  if (!cfg.gamma.empty()) kv("gamma", detail::join(cfg.gamma));
  if (!cfg.eta.empty()) kv("eta", detail::join(cfg.eta));
  kv("n_eta", std::to_string(cfg.meta.n_eta));
  kv("n_gamma", std::to_string(cfg.meta.n_gamma));
  kv("c_gamma", format_real(cfg.meta.c_gamma, 17));
  kv("gamma_meta", format_real(cfg.meta.gamma_meta, 17));
  if (cfg.meta.rule_bias) {
    kv("rule_bias", detail::join(std::vector<double>{(*cfg.meta.rule_bias)[0], (*cfg.meta.rule_bias)[1]}));
  }
  if (!cfg.sweep_n.empty()) kv("sweep_n", detail::join(cfg.sweep_n));
  if (cfg.trace_agent >= 0) kv("trace_agent", std::to_string(cfg.trace_agent));
  return out.str();
}

}  // namespace psmeta
