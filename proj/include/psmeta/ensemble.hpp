#pragma once

// Monte-Carlo ensembles: many independent agent/environment pairs, averaged
// at identical time indices. Agent i is seeded with base_seed + i and shares
// one generator with its environment. Agents run in parallel batches; sums
// are always folded in agent order so the result does not depend on the
// number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "psmeta/agent.hpp"
#include "psmeta/config.hpp"
#include "psmeta/env/grid_world.hpp"
#include "psmeta/env/invasion.hpp"
#include "psmeta/env/maps.hpp"
#include "psmeta/env/nship.hpp"

namespace psmeta {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Axis : std::uint8_t { Interactions, Trials, Eta };

inline std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::Interactions:
      return "interactions";
    case Axis::Trials:
      return "trials";
    case Axis::Eta:
      return "eta";
  }
  return "?";
}

struct TimeSeries {
  Axis axis = Axis::Interactions;
  std::vector<double> axis_values;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t size() const noexcept { return axis_values.size(); }

  bool has(std::string_view name) const { return std::find(names.begin(), names.end(), name) != names.end(); }

  const std::vector<double>& column(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw LookupError("time series has no column '" + std::string(name) + "'");
    return columns[static_cast<std::size_t>(it - names.begin())];
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

/// Full record of one agent: every sampled row plus its meta activations.
struct AgentTrace {
  std::size_t agent = 0;
  struct Row {
    std::uint64_t interaction;
    std::uint64_t trial;
    double reward;
    double gamma;
    double eta;
    double analytic_metric;
  };
  std::vector<Row> rows;
  std::vector<MetaEvent> events;
};

struct EnsembleResult {
  TimeSeries series;
  std::optional<AgentTrace> trace;
};

inline Axis axis_of(EnvKind env) { return env == EnvKind::Invasion ? Axis::Interactions : Axis::Trials; }

/// Environment-specific columns, followed by the columns every run records.
inline std::vector<std::string> metric_names(EnvKind env) {
  std::vector<std::string> names;
  switch (env) {
    case EnvKind::Invasion:
      names = {"success", "reward"};
      break;
    case EnvKind::NShip:
      names = {"reward", "game_reward", "n"};
      break;
    case EnvKind::Grid:
      names = {"steps_per_reward", "steps"};
      break;
  }
  for (const char* n : {"gamma", "eta", "p_rule1"}) names.emplace_back(n);
  for (double v : kEtaValues) names.push_back("p_eta_" + format_real(v, 10));
  names.emplace_back("phase");
  return names;
}

/// The agent parameters one single-run config asks for.
inline MetaConfig effective_meta(const EnsembleConfig& cfg) {
  MetaConfig meta = cfg.meta;
  if (!cfg.gamma.empty()) meta.initial_gamma = cfg.gamma.front();
  if (!cfg.eta.empty()) meta.initial_eta = cfg.eta.front();
  return meta;
}

inline GridMap resolve_map(const std::string& ref) {
  if (ref.size() == 1 && ref[0] >= 'a' && ref[0] <= 'c') return shipped_map(ref[0]);
  std::ifstream in(ref);
  if (!in) throw ConfigError("cannot open map file '" + ref + "'", 0, "maps");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return load_map(text);
  } catch (const MapError& e) {
    throw MapError(ref + ": " + e.what());
  }
}

inline std::vector<std::size_t> nship_durations(const EnsembleConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t n = cfg.n_start; n <= cfg.n_end; ++n) {
    const std::size_t k = n - cfg.n_start;
    std::size_t d = cfg.phase_len.size() == 1 ? cfg.phase_len[0] : cfg.phase_len[k];
    if (cfg.scale_by_n) d *= n;
    out.push_back(d);
  }
  return out;
}

inline InvasionGame make_invasion(const EnsembleConfig& cfg) {
  switch (cfg.schedule) {
    case InvasionScheduleKind::SinglePhase:
      return InvasionGame(InvasionSchedule::single());
    case InvasionScheduleKind::SuccessThreshold:
      return InvasionGame(InvasionSchedule::success_threshold(cfg.threshold, cfg.n_phases));
    case InvasionScheduleKind::FixedPeriod:
      break;
  }
  std::vector<std::size_t> periods = cfg.phase_len;
  if (cfg.n_phases) periods.resize(cfg.n_phases, periods.back());
  return InvasionGame(InvasionSchedule::fixed(std::move(periods)));
}

inline std::size_t interaction_cap(const EnsembleConfig& cfg) {
  if (cfg.max_interactions) return cfg.max_interactions;
  if (cfg.env == EnvKind::Invasion && cfg.schedule == InvasionScheduleKind::SinglePhase) return cfg.phase_len.front();
  return 0;
}

namespace detail {

inline void fill_common(const Agent& agent, double phase, double* row) {
  row[0] = agent.gamma();
  row[1] = agent.eta();
  row[2] = agent.rule_one_probability();
  const auto& net = agent.eta_controller().network();
  for (std::size_t k = 0; k < kEtaActionCount; ++k) row[3 + k] = net.probability(k);
  row[3 + kEtaActionCount] = phase;
}

struct AgentRows {
  std::vector<double> values;  // row-major
  std::size_t rows = 0;
};

template <class Env>
void simulate_agent(const EnsembleConfig& cfg, std::size_t index, Env env, AgentRows& out, AgentTrace* trace) {
  const std::size_t width = metric_names(cfg.env).size();
  const std::size_t env_cols = width - 4 - kEtaActionCount;
  const bool by_trial = axis_of(cfg.env) == Axis::Trials;
  const bool analytic_each_step =
      cfg.env == EnvKind::Invasion && cfg.schedule == InvasionScheduleKind::SuccessThreshold;
  const std::size_t cap = interaction_cap(cfg);

  Rng rng = make_rng(cfg.seed + index);
  Agent agent(cfg.variants.front(), env.action_labels(), env.percept_count(), effective_meta(cfg), rng,
              [&env](std::size_t p) { return env.percept_label(p); });
  if (trace) {
    trace->agent = index;
    agent.set_meta_observer([trace](const MetaEvent& e) { trace->events.push_back(e); });
  }

  std::size_t percept = env.reset(rng);
  std::uint64_t interactions = 0;
  std::uint64_t trials = 0;
  std::size_t trial_steps = 0;
  double trial_reward = 0.0;
  std::size_t last_steps = 0;
  double last_reward = 0.0;
  std::vector<double> row(width);

  while (!env.finished() && (cap == 0 || interactions < cap)) {
    const std::size_t action = agent.act(percept, rng);
    const EnvStep s = env.step(action, rng);
    agent.learn(s.reward, rng);
    ++interactions;
    ++trial_steps;
    trial_reward += s.reward;
    bool record = false;
    if (s.trial_ended) {
      ++trials;
      last_steps = trial_steps;
      last_reward = trial_reward;
      trial_steps = 0;
      trial_reward = 0.0;
      if (by_trial) record = trials % cfg.stride == 0;
    }
    if (!by_trial) record = interactions % cfg.stride == 0;

    double analytic = std::numeric_limits<double>::quiet_NaN();
    if (record) {
      if constexpr (std::is_same_v<Env, InvasionGame>) {
        analytic = env.analytic_metric(agent);
        row[0] = analytic;
        row[1] = s.reward;
      } else if constexpr (std::is_same_v<Env, NShipGame>) {
        analytic = env.analytic_metric(agent);
        row[0] = analytic;
        row[1] = last_reward;
        row[2] = static_cast<double>(env.n());
      } else {
        analytic = last_reward > 0.0 ? static_cast<double>(last_steps) / last_reward
                                     : std::numeric_limits<double>::infinity();
        row[0] = analytic;
        row[1] = static_cast<double>(last_steps);
      }
      fill_common(agent, static_cast<double>(env.phase()), row.data() + env_cols);
      out.values.insert(out.values.end(), row.begin(), row.end());
      ++out.rows;
      if (trace) trace->rows.push_back({interactions, trials, s.reward, agent.gamma(), agent.eta(), analytic});
    }

    if (analytic_each_step && std::isnan(analytic)) {
      if constexpr (std::is_same_v<Env, InvasionGame>) analytic = env.analytic_metric(agent);
    }
    const std::size_t before = env.percept_count();
    percept = s.next_percept;
    if (env.advance_schedule(analytic)) {
      if (env.percept_count() != before) agent.set_percept_count(env.percept_count());
      if constexpr (std::is_same_v<Env, GridWorld>) percept = env.map().index(env.position());
    }
  }
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first error.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline std::size_t resolve_workers(std::size_t workers) {
  if (workers) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

struct RunOptions {
  /// 0 = one per hardware thread.
  std::size_t workers = 1;
};

/// Runs one single-variant configuration (see expand()).
inline EnsembleResult run_ensemble(const EnsembleConfig& cfg, const RunOptions& opts = {}) {
  validate(cfg);
  if (cfg.variants.size() != 1 || cfg.gamma.size() > 1 || cfg.eta.size() > 1 || cfg.sweep_n.size() > 1) {
    throw ConfigError("run_ensemble takes one variant and at most one gamma, eta and n; expand the config first");
  }
  EnsembleConfig single = cfg;
  if (!single.sweep_n.empty()) single.n_start = single.n_end = single.sweep_n.front();

  std::vector<GridMap> maps;
  if (single.env == EnvKind::Grid) {
    for (const auto& ref : single.maps) maps.push_back(resolve_map(ref));
  }
  const auto durations = single.env == EnvKind::NShip ? nship_durations(single) : std::vector<std::size_t>{};

  auto simulate = [&](std::size_t i, detail::AgentRows& rows, AgentTrace* trace) {
    switch (single.env) {
      case EnvKind::Invasion:
        detail::simulate_agent(single, i, make_invasion(single), rows, trace);
        break;
      case EnvKind::NShip:
        detail::simulate_agent(single, i, NShipGame(NShipSchedule{single.n_start, single.n_end, durations, single.phase_unit}),
                               rows, trace);
        break;
      case EnvKind::Grid:
        detail::simulate_agent(single, i, GridWorld(maps, single.phase_len), rows, trace);
        break;
    }
  };

  const auto names = metric_names(single.env);
  const std::size_t width = names.size();
  const std::size_t workers = resolve_workers(opts.workers);
  const std::size_t batch = std::max<std::size_t>(1, workers * 4);

  EnsembleResult result;
  std::vector<double> sum;
  std::size_t max_rows = 0;
  std::vector<detail::AgentRows> outputs(batch);
  for (std::size_t start = 0; start < single.n_agents; start += batch) {
    const std::size_t count = std::min(batch, single.n_agents - start);
    for (auto& o : outputs) {
      o.values.clear();  // keeps capacity for the next batch
      o.rows = 0;
    }
    detail::parallel_for(count, workers, [&](std::size_t k) {
      const std::size_t i = start + k;
      AgentTrace* trace = nullptr;
      if (single.trace_agent >= 0 && static_cast<std::size_t>(single.trace_agent) == i) {
        result.trace.emplace();
        trace = &*result.trace;
      }
      simulate(i, outputs[k], trace);
    });
    // Fold in agent order. Agents whose run ended early hold their last row.
    for (std::size_t k = 0; k < count; ++k) {
      const auto& o = outputs[k];
      if (o.rows > max_rows) {
        // Row old-1 already holds every earlier agent's last row, which is
        // exactly what those agents contribute to the new rows.
        const std::size_t old = max_rows;
        sum.resize(o.rows * width, 0.0);
        if (old > 0) {
          for (std::size_t r = old; r < o.rows; ++r) {
            std::copy_n(sum.begin() + static_cast<std::ptrdiff_t>((old - 1) * width), width,
                        sum.begin() + static_cast<std::ptrdiff_t>(r * width));
          }
        }
        max_rows = o.rows;
      }
      if (o.rows == 0) continue;
      for (std::size_t r = 0; r < max_rows; ++r) {
        const std::size_t src = std::min(r, o.rows - 1);
        for (std::size_t c = 0; c < width; ++c) sum[r * width + c] += o.values[src * width + c];
      }
    }
  }

  TimeSeries& ts = result.series;
  ts.axis = axis_of(single.env);
  ts.names = names;
  ts.columns.assign(width, std::vector<double>(max_rows));
  ts.axis_values.resize(max_rows);
  const double n = static_cast<double>(single.n_agents);
  for (std::size_t r = 0; r < max_rows; ++r) {
    ts.axis_values[r] = static_cast<double>((r + 1) * single.stride);
    for (std::size_t c = 0; c < width; ++c) ts.columns[c][r] = sum[r * width + c] / n;
  }
  return result;
}

/// One concrete run of an expanded config and the file stem it writes to.
struct RunPlan {
  std::string stem;
  EnsembleConfig cfg;
};

/// Splits a config with several variants, gamma or eta values into single runs.
/// n-ship sweeps (sweep_n) keep their eta list; see run_sweep().
inline std::vector<RunPlan> expand(const EnsembleConfig& cfg) {
  validate(cfg);
  std::vector<RunPlan> plans;
  const std::vector<std::optional<double>> gammas =
      cfg.gamma.empty() ? std::vector<std::optional<double>>{std::nullopt}
                        : std::vector<std::optional<double>>(cfg.gamma.begin(), cfg.gamma.end());
  const bool sweep = !cfg.sweep_n.empty();
  const std::vector<std::optional<double>> etas =
      cfg.eta.empty() || sweep ? std::vector<std::optional<double>>{std::nullopt}
                               : std::vector<std::optional<double>>(cfg.eta.begin(), cfg.eta.end());
  for (auto v : cfg.variants) {
    for (const auto& g : gammas) {
      for (const auto& e : etas) {
        RunPlan plan{cfg.name + "_" + std::string(to_string(v)), cfg};
        plan.cfg.variants = {v};
        if (g) {
          plan.cfg.gamma = {*g};
          if (cfg.gamma.size() > 1) plan.stem += "_gamma" + format_real(*g, 10);
        }
        if (e) {
          plan.cfg.eta = {*e};
          if (cfg.eta.size() > 1) plan.stem += "_eta" + format_real(*e, 10);
        }
        plans.push_back(std::move(plan));
      }
    }
  }
  return plans;
}

/// Final-record value of `column` for every (eta, n) pair: a table with eta
/// on the axis and one column per n.
inline TimeSeries run_sweep(const EnsembleConfig& cfg, const RunOptions& opts = {},
                            std::string_view column = "reward") {
  if (cfg.sweep_n.empty() || cfg.eta.empty()) throw ConfigError("a sweep needs sweep_n and eta lists");
  TimeSeries table;
  table.axis = Axis::Eta;
  table.axis_values = cfg.eta;
  for (auto n : cfg.sweep_n) {
    table.names.push_back(std::string(column) + "_n" + std::to_string(n));
    std::vector<double> values;
    for (double eta : cfg.eta) {
      EnsembleConfig one = cfg;
      one.sweep_n = {n};
      one.eta = {eta};
      one.trace_agent = -1;
      const auto series = run_ensemble(one, opts).series;
      const auto& col = series.column(column);
      values.push_back(col.empty() ? std::numeric_limits<double>::quiet_NaN() : col.back());
    }
    table.columns.push_back(std::move(values));
  }
  return table;
}

// --- output -----------------------------------------------------------------

inline void write_csv(const TimeSeries& ts, std::ostream& out) {
  out << "axis_value";
  for (const auto& n : ts.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < ts.size(); ++r) {
    out << format_real(ts.axis_values[r], 10);
    for (const auto& col : ts.columns) out << ',' << format_real(col[r], 10);
    out << '\n';
  }
}

inline void write_trace(const AgentTrace& trace, std::ostream& rows, std::ostream& events) {
  rows << "interaction,trial,reward,gamma,eta,analytic_metric\n";
  for (const auto& r : trace.rows) {
    rows << r.interaction << ',' << r.trial << ',' << format_real(r.reward, 10) << ',' << format_real(r.gamma, 10)
         << ',' << format_real(r.eta, 10) << ',' << format_real(r.analytic_metric, 10) << '\n';
  }
  events << "t,xi,chosen_action,lambda_internal,gamma,eta\n";
  for (const auto& e : trace.events) {
    events << e.t << ',' << to_string(e.xi) << ',' << e.chosen_action << ',' << e.lambda_internal << ','
           << format_real(e.gamma, 10) << ',' << format_real(e.eta, 10) << '\n';
  }
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

inline void write_sidecar(const std::filesystem::path& path, const EnsembleConfig& cfg, Axis axis) {
  auto out = open_out(path);
  out << "# psmeta " << kVersion << "\n# axis = " << to_string(axis) << "\n# agent i is seeded with seed + i\n"
      << to_config_text(cfg);
}

}  // namespace detail

/// Runs everything a config describes and writes `<stem>.csv` and
/// `<stem>.meta` per run into `dir`. Returns the CSV paths.
inline std::vector<std::filesystem::path> run_to_files(const EnsembleConfig& cfg, const std::filesystem::path& dir,
                                                       const RunOptions& opts = {}) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& plan : expand(cfg)) {
    const auto csv = dir / (plan.stem + ".csv");
    if (!plan.cfg.sweep_n.empty()) {
      const auto table = run_sweep(plan.cfg, opts);
      auto out = detail::open_out(csv);
      write_csv(table, out);
      detail::write_sidecar(dir / (plan.stem + ".meta"), plan.cfg, table.axis);
    } else {
      const auto result = run_ensemble(plan.cfg, opts);
      auto out = detail::open_out(csv);
      write_csv(result.series, out);
      detail::write_sidecar(dir / (plan.stem + ".meta"), plan.cfg, result.series.axis);
      if (result.trace) {
        const std::string base = plan.stem + "_agent" + std::to_string(result.trace->agent);
        auto rows = detail::open_out(dir / (base + ".csv"));
        auto events = detail::open_out(dir / (base + "_meta.csv"));
        write_trace(*result.trace, rows, events);
      }
    }
    written.push_back(csv);
  }
  return written;
}

}  // namespace psmeta
