#pragma once

// Acceptance checks. Each one runs a scaled protocol and reports whether the
// expected qualitative result shows up, with the numbers it saw.

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "psmeta/analysis.hpp"
#include "psmeta/ensemble.hpp"
#include "psmeta/presets.hpp"

namespace psmeta {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct ValidationOptions {
  std::size_t workers = 0;
};

namespace detail {

inline std::string fmt(double v, int digits = 4) { return format_real(v, digits); }

template <class T>
std::string fmt_list(const std::vector<T>& v, int digits = 4) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += " ";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i], digits);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out + "]";
}

template <class T>
bool strictly_decreasing(const std::vector<T>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

/// Mean of a column over the records of phase `k`.
inline double phase_mean(const TimeSeries& ts, std::string_view column, std::size_t k) {
  const auto ranges = phase_ranges(ts);
  return mean_over(ts, column, ranges.at(k).first, ranges.at(k).second);
}

}  // namespace detail

// 1. With gamma = 0 and eta = 1 under regular inversions, edge counts for
// both attacker strategies balance out and success drifts to 1/2.
inline CriterionResult criterion_random_baseline(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 1;
  r.name = "random baseline (fig3 protocol)";
  const auto cfg = expand(preset("fig3")).front().cfg;
  const auto ts = run_ensemble(cfg, {opt.workers}).series;
  const auto ranges = phase_ranges(ts);
  const auto last = ranges.size() - 1;
  const double pair = mean_over(ts, "success", ranges[last - 1].first, ranges[last].second);
  r.passed = ranges.size() == 10 && std::abs(pair - 0.5) <= 0.03;
  r.detail = "phases=" + std::to_string(ranges.size()) + " success(phases 9-10)=" + detail::fmt(pair);
  return r;
}

// 2. Larger gamma: lower success before the inversion, faster recovery after.
inline CriterionResult criterion_gamma_tradeoff(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 2;
  r.name = "gamma trade-off ordering (fig1 protocol)";
  auto cfg = preset("fig1:desk");
  cfg.gamma = {0.0, 0.001, 0.01};
  std::vector<double> asymptote;
  std::vector<std::size_t> recovery;
  for (const auto& plan : expand(cfg)) {
    const auto ts = run_ensemble(plan.cfg, {opt.workers}).series;
    const auto ranges = phase_ranges(ts);
    asymptote.push_back(ts.column("success")[ranges[0].second - 1]);
    recovery.push_back(learning_time(ts, 0.75).at(1));
  }
  r.passed = detail::strictly_decreasing(asymptote) && detail::strictly_decreasing(recovery);
  r.detail = "gamma=[0 0.001 0.01] success@250=" + detail::fmt_list(asymptote, 6) +
             " recovery_to_0.75=" + detail::fmt_list(recovery);
  return r;
}

// 3. Success-triggered inversions: each relearning takes longer than the last.
inline CriterionResult criterion_exponential_relearning(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 3;
  r.name = "exponential relearning (fig2 protocol)";
  const auto cfg = expand(preset("fig2:desk")).front().cfg;
  const auto ts = run_ensemble(cfg, {opt.workers}).series;
  const auto times = learning_time(ts, 0.8);
  bool ok = times.size() >= 6;
  std::vector<double> ratios;
  for (std::size_t k = 1; k < times.size() && k < 6; ++k) {
    ok = ok && times[k] > times[k - 1];
    const double ratio = static_cast<double>(times[k]) / static_cast<double>(std::max<std::size_t>(times[k - 1], 1));
    ratios.push_back(ratio);
    if (k >= 2) ok = ok && ratio > 1.5;
  }
  r.passed = ok;
  r.detail = "learning_times=" + detail::fmt_list(times) + " ratios=" + detail::fmt_list(ratios, 3);
  return r;
}

// 4. The best glow parameter moves down as the reward delay grows.
inline CriterionResult criterion_eta_optimum(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 4;
  r.name = "eta optimum shift (fig4 protocol)";
  const auto cfg = expand(preset("fig4:desk")).front().cfg;
  const auto table = run_sweep(cfg, {opt.workers});
  std::vector<double> best;
  std::ostringstream detail;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto& col = table.columns[c];
    const auto it = std::max_element(col.begin(), col.end());
    best.push_back(table.axis_values[static_cast<std::size_t>(it - col.begin())]);
    detail << table.names[c] << "=" << detail::fmt_list(col, 3) << " ";
  }
  r.passed = best.size() == 3 && detail::strictly_decreasing(best);
  r.detail = "argmax_eta(n=2,3,4)=" + detail::fmt_list(best, 2) + " " + detail.str();
  return r;
}

/// Where following the strongest edge from the start cell leads.
struct GreedyPath {
  enum class End : std::uint8_t { Goal, Distractor, None } end = End::None;
  std::size_t steps = 0;
};

inline GreedyPath greedy_path(const Agent& agent, const GridMap& map, std::size_t max_steps = 200) {
  GreedyPath out;
  Position p = map.start;
  for (std::size_t step = 1; step <= max_steps; ++step) {
    const auto probs = agent.action_probabilities(map.index(p));
    const auto a = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    p = map.apply(p, static_cast<Move>(a));
    if (p == map.goal) return {GreedyPath::End::Goal, step};
    if (map.distractor && p == *map.distractor) return {GreedyPath::End::Distractor, step};
  }
  return out;
}

/// Runs `agents` fixed-parameter agents on one map for `trials` trials each and
/// tallies where their greedy paths end.
inline std::array<std::size_t, 3> grid_convergence(const GridMap& map, double eta, std::size_t agents,
                                                   std::size_t trials, std::uint64_t seed, std::size_t workers) {
  std::vector<GreedyPath> paths(agents);
  detail::parallel_for(agents, resolve_workers(workers), [&](std::size_t i) {
    Rng rng = make_rng(seed + i);
    GridWorld env(map);
    MetaConfig meta;
    meta.initial_gamma = 0.0;
    meta.initial_eta = eta;
    Agent agent(AgentVariant::FixedRandomParams, env.action_labels(), env.percept_count(), meta, rng);
    std::size_t percept = env.reset(rng);
    for (std::size_t t = 0; t < trials;) {
      const auto s = env.step(agent.act(percept, rng), rng);
      agent.learn(s.reward, rng);
      percept = s.next_percept;
      if (s.trial_ended) ++t;
    }
    paths[i] = greedy_path(agent, map);
  });
  std::array<std::size_t, 3> counts{};
  for (const auto& p : paths) {
    if (p.end == GreedyPath::End::Goal && p.steps == map.goal_distance) ++counts[0];
    else if (p.end == GreedyPath::End::Distractor && p.steps == map.distractor_distance) ++counts[1];
    else ++counts[2];
  }
  return counts;
}

inline constexpr std::size_t kGridConvergenceTrials = 100000;

// 5. With a distractor worth 1/3, only small glow values keep the far goal worth it.
inline CriterionResult criterion_grid_threshold(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 5;
  r.name = "grid-world eta threshold (map c, gamma=0)";
  const GridMap map = shipped_map('c');
  const auto low = grid_convergence(map, 0.3, 100, kGridConvergenceTrials, 1, opt.workers);
  const auto high = grid_convergence(map, 0.6, 100, kGridConvergenceTrials, 1, opt.workers);
  r.passed = low[0] >= 90 && high[1] >= 90;
  r.detail = "eta=0.3: goal14=" + std::to_string(low[0]) + " distractor12=" + std::to_string(low[1]) +
             " other=" + std::to_string(low[2]) + "; eta=0.6: goal14=" + std::to_string(high[0]) +
             " distractor12=" + std::to_string(high[1]) + " other=" + std::to_string(high[2]);
  return r;
}

// 6. Changing invasion game: full meta-learning beats gamma-only, which beats fixed.
inline CriterionResult criterion_meta_invasion(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 6;
  r.name = "meta-learning invasion game (fig7/fig8 desk)";
  const auto plans = expand(preset("fig7:desk"));
  std::map<AgentVariant, TimeSeries> runs;
  for (const auto& plan : plans) runs[plan.cfg.variants.front()] = run_ensemble(plan.cfg, {opt.workers}).series;
  auto final_success = [&](AgentVariant v) {
    const auto& ts = runs.at(v);
    return detail::phase_mean(ts, "success", phase_ranges(ts).size() - 1);
  };
  const double full = final_success(AgentVariant::FullMeta);
  const double gamma_only = final_success(AgentVariant::GammaOnlyRandomEta);
  const double fixed = final_success(AgentVariant::FixedRandomParams);
  const auto& ts = runs.at(AgentVariant::FullMeta);
  const double rule_first = detail::phase_mean(ts, "p_rule1", 0);
  const double rule_last = detail::phase_mean(ts, "p_rule1", phase_ranges(ts).size() - 1);
  r.passed = full >= 0.9 && fixed <= 0.7 && gamma_only < full && gamma_only > fixed && rule_last > rule_first;
  r.detail = "final-phase success full=" + detail::fmt(full) + " gamma_only=" + detail::fmt(gamma_only) +
             " fixed=" + detail::fmt(fixed) + "; P(rule I) first phase=" + detail::fmt(rule_first) +
             " last phase=" + detail::fmt(rule_last);
  return r;
}

// 7. Dynamic n-ship game: full meta-learning finds the delayed reward for each n.
inline CriterionResult criterion_dynamic_nship(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 7;
  r.name = "dynamic n-ship (fig9 desk)";
  std::map<AgentVariant, std::vector<double>> end_reward;
  for (const auto& plan : expand(preset("fig9:desk"))) {
    const auto ts = run_ensemble(plan.cfg, {opt.workers}).series;
    auto& out = end_reward[plan.cfg.variants.front()];
    for (auto [begin, end] : phase_ranges(ts)) out.push_back(ts.column("reward")[end - 1]);
  }
  const auto& full = end_reward.at(AgentVariant::FullMeta);
  const auto& gamma_only = end_reward.at(AgentVariant::GammaOnlyRandomEta);
  bool ok = full.size() == 4 && gamma_only.size() == 4;
  for (std::size_t n = 2; ok && n <= 4; ++n) {
    ok = full[n - 1] >= 0.9 * nship_optimal_reward(n);
    if (n >= 3) ok = ok && gamma_only[n - 1] < full[n - 1];
  }
  r.passed = ok;
  r.detail = "end-of-phase reward n=1..4 full=" + detail::fmt_list(full) + " gamma_only=" + detail::fmt_list(gamma_only) +
             " optimal=[1 5 10 15]";
  return r;
}

// 8. Grid world with a distractor in the last phase.
inline CriterionResult criterion_grid_meta(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 8;
  r.name = "grid-world phase 3 (fig10 desk)";
  double full_spr = 0.0, gamma_only_spr = 0.0, low_eta = 0.0;
  for (const auto& plan : expand(preset("fig10:desk"))) {
    const auto ts = run_ensemble(plan.cfg, {opt.workers}).series;
    const auto [begin, end] = phase_ranges(ts).back();
    const std::size_t tail = end - std::max<std::size_t>(1, (end - begin) / 10);
    const double spr = mean_over(ts, "steps_per_reward", tail, end);
    if (plan.cfg.variants.front() == AgentVariant::FullMeta) {
      full_spr = spr;
      low_eta = ts.column("p_eta_0.1").back() + ts.column("p_eta_0.2").back();
    } else {
      gamma_only_spr = spr;
    }
  }
  r.passed = full_spr <= 20.0 && gamma_only_spr >= 30.0 && low_eta > 0.6;
  r.detail = "phase-3 tail steps/reward full=" + detail::fmt(full_spr) + " gamma_only=" + detail::fmt(gamma_only_spr) +
             "; full P(eta=0.1)+P(eta=0.2)=" + detail::fmt(low_eta);
  return r;
}

// 9. Model properties, checked directly.
inline CriterionResult criterion_properties(const ValidationOptions& opt) {
  CriterionResult r;
  r.id = 9;
  r.name = "unit/property checks";
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    if (!ok) failed.emplace_back(what);
  };
  Rng rng = make_rng(2024);

  // Walk probabilities are normalized.
  {
    ClipNetwork net = ClipNetwork::two_layer({"p"}, {"a", "b", "c"});
    for (int i = 0; i < 3; ++i) net.set_h(net.out_edges(net.percept("p"))[i], 1.0 + 3.0 * uniform01(rng));
    const auto p = net.transition_probabilities(net.percept("p"));
    double total = 0.0;
    for (double v : p) total += v;
    check(std::abs(total - 1.0) < 1e-12, "normalization");
  }
  // h >= 1 and g in [0, 1] under random sequences of operations.
  {
    ClipNetwork net = ClipNetwork::two_layer({"p", "q"}, {"a", "b"});
    WalkTrace trace;
    bool ok = true;
    for (int step = 0; step < 20000; ++step) {
      net.walk(net.percept(uniform01(rng) < 0.5 ? "p" : "q"), rng, trace);
      net.refresh_glow(trace);
      net.update_h(4.0 * uniform01(rng) - 1.0, uniform01(rng) < 0.3 ? 0.0 : uniform01(rng));
      net.damp_glow(uniform01(rng));
      for (EdgeId e = 0; e < net.edge_count(); ++e) {
        ok = ok && net.h(e) >= 1.0 && net.g(e) >= 0.0 && net.g(e) <= 1.0;
      }
    }
    check(ok, "h>=1, g in [0,1] under fuzzing");
  }
  // eta = 1 reduces to the glow-free update on the traversed edge.
  {
    ClipNetwork net = ClipNetwork::two_layer({"p", "q"}, {"a", "b"});
    std::vector<double> plain(net.edge_count(), 1.0);
    Rng walk_rng = make_rng(7);
    WalkTrace trace;
    bool same = true;
    for (int step = 0; step < 5000; ++step) {
      const double gamma = step % 3 == 0 ? 0.0 : 0.01 * uniform01(rng);
      const double lambda = uniform01(rng) < 0.5 ? 1.0 : 0.0;
      net.walk(net.percept(step % 2 ? "p" : "q"), walk_rng, trace);
      net.refresh_glow(trace);
      net.update_h(lambda, gamma);
      net.damp_glow(1.0);
      for (EdgeId e = 0; e < net.edge_count(); ++e) {
        const bool hit = std::find(trace.edges.begin(), trace.edges.end(), e) != trace.edges.end();
        plain[e] = plain[e] - gamma * (plain[e] - 1.0) + (hit ? lambda : 0.0);
        same = same && plain[e] == net.h(e);
      }
    }
    check(same, "eta=1 bit-identical to plain update");
  }
  // Constant reward with damping converges to 1 + lambda / gamma.
  {
    ClipNetwork net = ClipNetwork::two_layer({"p"}, {"a"});
    Rng one = make_rng(1);
    WalkTrace trace;
    for (int step = 0; step < 20000; ++step) {
      net.walk(net.percept("p"), one, trace);
      net.refresh_glow(trace);
      net.update_h(1.0, 0.01);
      net.damp_glow(1.0);
    }
    check(std::abs(net.h(0) - 101.0) < 1e-6, "fixed point 1 + lambda/gamma");
  }
  // Rules keep gamma in [0, 1] and leave it alone when tilde delta is zero.
  {
    bool ok = true;
    for (int i = 0; i < 20000; ++i) {
      const double g = uniform01(rng);
      const double t = 2.0 * uniform01(rng) - 1.0;
      const double a = rule_one(g, t), b = rule_two(g, t);
      ok = ok && a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0;
      ok = ok && rule_one(g, 0.0) == g && rule_two(g, 0.0) == g;
    }
    check(ok, "rule range and fixed points");
  }
  // Delta depends only on the ratio of the two window sums.
  {
    bool ok = true;
    for (int i = 0; i < 10000; ++i) {
      const double a = 100.0 * uniform01(rng), b = 100.0 * uniform01(rng);
      const double k = std::ldexp(1.0, static_cast<int>(uniform_index(rng, 20)) - 10);
      ok = ok && window_delta(k * a, k * b) == window_delta(a, b);
    }
    check(ok, "delta scale invariance");
  }
  // Expected n-ship reward matches enumerating every deterministic strategy.
  {
    bool ok = true;
    for (std::size_t n = 1; n <= 4; ++n) {
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        NShipGame game(n);
        Rng unused = make_rng(0);
        game.reset(unused);
        double total = 0.0;
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
          const bool block = (mask >> i) & 1u;
          p[i] = block ? 1.0 : 0.0;
          total += game.step(block ? NShipGame::kBlock : NShipGame::kPass, unused).reward;
        }
        ok = ok && total == nship_expected_reward(p);
      }
    }
    check(ok, "n-ship enumeration");
  }
  // The number of workers never changes the ensemble result.
  {
    EnsembleConfig cfg = preset("fig7:desk");
    cfg.variants = {AgentVariant::FullMeta};
    cfg.n_agents = 6;
    cfg.phase_len = {3000};
    cfg.n_phases = 3;
    cfg.stride = 7;
    cfg.meta.n_eta = 1;
    cfg.meta.n_gamma = 2;
    const auto serial = run_ensemble(cfg, {1}).series;
    const auto parallel = run_ensemble(cfg, {std::max<std::size_t>(3, resolve_workers(opt.workers))}).series;
    check(serial == parallel, "parallel/serial bit-equality");
  }

  r.passed = failed.empty();
  if (failed.empty()) {
    r.detail = "all 8 property groups hold";
  } else {
    for (const auto& f : failed) r.detail += (r.detail.empty() ? "failed: " : ", ") + f;
  }
  return r;
}

struct CriterionDef {
  int id;
  double budget_seconds;
  std::function<CriterionResult(const ValidationOptions&)> run;
};

inline const std::vector<CriterionDef>& criteria() {
  static const std::vector<CriterionDef> all{
      {1, 10, criterion_random_baseline},       {2, 30, criterion_gamma_tradeoff},
      {3, 5, criterion_exponential_relearning}, {4, 600, criterion_eta_optimum},
      {5, 300, criterion_grid_threshold},       {6, 900, criterion_meta_invasion},
      {7, 1200, criterion_dynamic_nship},       {8, 3600, criterion_grid_meta},
      {9, 60, criterion_properties},
  };
  return all;
}

/// Runs one criterion, times it, and fails it if it overran its budget.
inline CriterionResult run_criterion(const CriterionDef& def, const ValidationOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = def.run(opt);
  } catch (const std::exception& e) {
    r.id = def.id;
    r.name = "criterion " + std::to_string(def.id);
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.budget_seconds = def.budget_seconds;
  if (r.seconds > r.budget_seconds) {
    r.passed = false;
    r.detail += " (over time budget)";
  }
  return r;
}

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << " | " << r.detail << " | "
      << format_real(r.seconds, 3) << "s of " << format_real(r.budget_seconds, 4) << "s";
  return out.str();
}

}  // namespace psmeta
