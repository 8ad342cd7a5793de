#pragma once

// Figure presets. Each name gives the full-scale protocol; a ":desk" suffix
// gives a scaled-down version that keeps the window formulas and the
// per-phase structure but uses fewer agents, phases or trials:
//   fig1:desk   10^4 agents instead of 10^6
//   fig2:desk   6 phases instead of 10
//   fig3:desk   same as fig3 (already cheap)
//   fig4:desk   200 agents, reward at game 10^5 instead of 1000 agents at 10^6
//   fig7/8:desk 20 agents, 6 phases instead of 100 agents, 21 phases
//   fig9:desk   20 agents, phase lengths / 10
//   fig10:desk  100 agents, phase lengths / 10

#include <string>
#include <string_view>
#include <vector>

#include "psmeta/config.hpp"
#include "psmeta/error.hpp"

namespace psmeta {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "fig7", "fig8", "fig9", "fig10"};
  return names;
}

inline EnsembleConfig preset(std::string_view full_name) {
  std::string_view name = full_name;
  bool desk = false;
  if (const auto colon = name.find(':'); colon != std::string_view::npos) {
    if (name.substr(colon + 1) != "desk") throw LookupError("unknown preset '" + std::string(full_name) + "'");
    desk = true;
    name = name.substr(0, colon);
  }

  EnsembleConfig c;
  c.name = std::string(name);
  if (name == "fig1") {
    // One inversion at 250; the second phase is long enough to see every curve recover.
    c.env = EnvKind::Invasion;
    c.variants = {AgentVariant::FixedRandomParams};
    c.schedule = InvasionScheduleKind::FixedPeriod;
    c.phase_len = {250, 2750};
    c.gamma = {0.0, 0.001, 0.01, 0.1};
    c.eta = {1.0};
    c.n_agents = desk ? 10000 : 1000000;
  } else if (name == "fig2") {
    // A single agent; the attacker inverts whenever success reaches 0.8.
    c.env = EnvKind::Invasion;
    c.variants = {AgentVariant::FixedRandomParams};
    c.schedule = InvasionScheduleKind::SuccessThreshold;
    c.threshold = 0.8;
    c.n_phases = desk ? 6 : 10;
    c.max_interactions = desk ? 10000000 : 100000000;
    c.phase_len = {1};
    c.gamma = {0.0};
    c.eta = {1.0};
    c.n_agents = 1;
  } else if (name == "fig3") {
    c.env = EnvKind::Invasion;
    c.variants = {AgentVariant::FixedRandomParams};
    c.schedule = InvasionScheduleKind::FixedPeriod;
    c.phase_len = {500};
    c.n_phases = 10;
    c.gamma = {0.0};
    c.eta = {1.0};
    c.n_agents = 100;
  } else if (name == "fig4") {
    c.env = EnvKind::NShip;
    c.variants = {AgentVariant::FixedRandomParams};
    c.sweep_n = {2, 3, 4};
    c.eta = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    c.gamma = {1e-4};
    c.scale_by_n = false;
    c.phase_len = {desk ? 100000u : 1000000u};
    c.stride = c.phase_len.front();
    c.n_agents = desk ? 200 : 1000;
  } else if (name == "fig7" || name == "fig8") {
    c.env = EnvKind::Invasion;
    c.variants = name == "fig7" ? std::vector<AgentVariant>{AgentVariant::FullMeta, AgentVariant::GammaOnlyRandomEta,
                                                            AgentVariant::FixedRandomParams}
                                : std::vector<AgentVariant>{AgentVariant::FullMeta};
    c.schedule = InvasionScheduleKind::FixedPeriod;
    c.phase_len = {120000};
    c.n_phases = desk ? 6 : 21;
    c.stride = 1000;
    c.n_agents = desk ? 20 : 100;
  } else if (name == "fig9") {
    c.env = EnvKind::NShip;
    c.variants = {AgentVariant::FullMeta, AgentVariant::GammaOnlyRandomEta};
    c.n_start = 1;
    c.n_end = 4;
    c.scale_by_n = true;
    c.phase_unit = PhaseUnit::Trials;
    c.phase_len = {desk ? 35000u : 350000u};
    c.meta.rule_bias = std::array<double, 2>{1e5, 1.0};
    c.stride = desk ? 100 : 1000;
    c.n_agents = desk ? 20 : 100;
  } else if (name == "fig10") {
    c.env = EnvKind::Grid;
    c.variants = {AgentVariant::FullMeta, AgentVariant::GammaOnlyRandomEta};
    c.maps = {"a", "b", "c"};
    c.phase_len = desk ? std::vector<std::size_t>{100000, 100000, 500000}
                       : std::vector<std::size_t>{1000000, 1000000, 5000000};
    c.meta.rule_bias = std::array<double, 2>{1e5, 1.0};
    c.stride = desk ? 100 : 1000;
    c.n_agents = desk ? 100 : 10000;
  } else {
    throw LookupError("unknown preset '" + std::string(full_name) + "'");
  }
  validate(c);
  return c;
}

}  // namespace psmeta
