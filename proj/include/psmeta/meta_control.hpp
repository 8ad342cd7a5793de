#pragma once

// Meta-level clip networks. Each meta-parameter (damping gamma, glow eta)
// gets a two-layer network with one percept and a handful of action clips.
// The network is consulted once per window of tau interactions and is
// rewarded with the sign of the normalized change in windowed reward.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmeta/clip_network.hpp"
#include "psmeta/random.hpp"

namespace psmeta {

inline constexpr std::size_t kEtaActionCount = 10;
inline constexpr std::array<double, kEtaActionCount> kEtaValues = {0.1, 0.2, 0.3, 0.4, 0.5,
                                                                    0.6, 0.7, 0.8, 0.9, 1.0};

enum class GammaRule : std::uint8_t { I = 0, II = 1 };

struct MetaConfig {
  std::size_t n_eta = 30;
  std::size_t n_gamma = 5;
  double c_gamma = 0.2;
  /// Damping of the meta networks themselves.
  double gamma_meta = 0.0;
  /// Initial h-values of (rule I, rule II) in the gamma network.
  std::optional<std::array<double, 2>> rule_bias;
  /// Starting values; drawn at random when absent.
  std::optional<double> initial_gamma;
  std::optional<double> initial_eta;

  friend bool operator==(const MetaConfig&, const MetaConfig&) = default;
};

/// tau_eta = N_eta * S * A * S_eta * A_eta with S_eta = 1, A_eta = 10.
inline std::size_t eta_window_length(std::size_t percepts, std::size_t actions, const MetaConfig& cfg) {
  return cfg.n_eta * percepts * actions * 1 * kEtaActionCount;
}

inline std::size_t gamma_window_length(std::size_t percepts, std::size_t actions, const MetaConfig& cfg) {
  return cfg.n_gamma * eta_window_length(percepts, actions, cfg);
}

// --- performance windows ----------------------------------------------------

struct WindowClosed {
  double now;
  std::optional<double> previous;
};

class WindowAccumulator {
 public:
  explicit WindowAccumulator(std::size_t tau = 1) { reset(tau); }

  std::optional<WindowClosed> accumulate(double reward) {
    current_ += reward;
    if (++ticks_ < tau_) return std::nullopt;
    WindowClosed closed{current_, previous_};
    previous_ = current_;
    current_ = 0.0;
    ticks_ = 0;
    return closed;
  }

  /// Drops all history and starts a fresh window of length tau.
  void reset(std::size_t tau) {
    if (tau == 0) throw ConfigError("window length must be positive");
    tau_ = tau;
    current_ = 0.0;
    previous_.reset();
    ticks_ = 0;
  }

  /// New window length; the partial window is dropped and the previous sum
  /// is rescaled to the new length so the next comparison is per interaction.
  void resize(std::size_t tau) {
    if (tau == 0) throw ConfigError("window length must be positive");
    if (previous_) *previous_ *= static_cast<double>(tau) / static_cast<double>(tau_);
    tau_ = tau;
    current_ = 0.0;
    ticks_ = 0;
  }

  std::size_t tau() const noexcept { return tau_; }
  std::size_t ticks() const noexcept { return ticks_; }
  double current_sum() const noexcept { return current_; }
  std::optional<double> previous_sum() const noexcept { return previous_; }

 private:
  std::size_t tau_ = 1;
  double current_ = 0.0;
  std::optional<double> previous_;
  std::size_t ticks_ = 0;
};

/// (now - prev) / max(now, prev); zero when both windows earned nothing.
inline double window_delta(double now, double prev) {
  const double top = std::max(now, prev);
  if (top == 0.0) return 0.0;
  return (now - prev) / top;
}

inline int internal_reward(double delta) { return (delta > 0.0) - (delta < 0.0); }

inline double tilde_delta(double delta, double c_gamma) { return (delta + c_gamma) / (1.0 + c_gamma); }

/// Rule I: forget more when performance drops, less when it improves.
inline double rule_one(double gamma, double tilde) {
  const double a = std::abs(tilde);
  return (1.0 - a) * gamma + (a - tilde) / 2.0;
}

/// Rule II: the mirror image, improvement raises gamma.
inline double rule_two(double gamma, double tilde) {
  const double a = std::abs(tilde);
  return (1.0 - a) * gamma + (a + tilde) / 2.0;
}

inline double apply_rule(GammaRule rule, double gamma, double tilde) {
  const double next = rule == GammaRule::I ? rule_one(gamma, tilde) : rule_two(gamma, tilde);
  return std::clamp(next, 0.0, 1.0);
}

// --- meta network -------------------------------------------------------------

/// Two-layer network with a single percept. Its update has no glow:
/// h <- h - gamma_meta (h - 1) + lambda on the last traversed edge,
/// h <- h - gamma_meta (h - 1) elsewhere, then h >= 1.
class MetaNetwork {
 public:
  MetaNetwork(const std::vector<std::string>& action_labels, double gamma_meta)
      : gamma_meta_(gamma_meta) {
    for (const auto& a : action_labels) actions_.push_back(net_.add_action(a));
    percept_ = net_.add_percept_to("meta", actions_);
    net_.validate();
  }

  /// Random walk from the percept; remembers the trace for the next update.
  std::size_t select(Rng& rng) {
    WalkTrace trace;
    net_.walk(percept_, rng, trace);
    last_action_ = action_index(trace.action);
    last_trace_ = std::move(trace);
    return *last_action_;
  }

  /// Applies the internal reward to the last selection; no-op before the first.
  void update(int internal_reward) {
    if (!last_trace_) return;
    const auto outs = net_.out_edges(percept_);
    for (auto e : outs) {
      const double h = net_.h(e);
      double v = h - gamma_meta_ * (h - 1.0);
      if (std::find(last_trace_->edges.begin(), last_trace_->edges.end(), e) != last_trace_->edges.end()) {
        v += internal_reward;
      }
      net_.set_h(e, v < 1.0 ? 1.0 : v);
    }
  }

  std::vector<double> probabilities() const { return net_.transition_probabilities(percept_); }

  double probability(std::size_t action) const {
    const auto outs = net_.out_edges(percept_);
    double total = 0.0;
    for (auto e : outs) total += net_.h(e);
    return net_.h(outs[action]) / total;
  }

  void set_action_h(std::size_t action, double h) { net_.set_h(net_.out_edges(percept_)[action], h); }
  double action_h(std::size_t action) const { return net_.h(net_.out_edges(percept_)[action]); }

  std::size_t action_count() const noexcept { return actions_.size(); }
  std::optional<std::size_t> last_action() const noexcept { return last_action_; }
  const ClipNetwork& network() const noexcept { return net_; }

 private:
  std::size_t action_index(ClipId id) const {
    return static_cast<std::size_t>(std::find(actions_.begin(), actions_.end(), id) - actions_.begin());
  }

  ClipNetwork net_;
  std::vector<ClipId> actions_;
  ClipId percept_;
  double gamma_meta_;
  std::optional<WalkTrace> last_trace_;
  std::optional<std::size_t> last_action_;
};

inline std::vector<std::string> eta_action_labels() {
  std::vector<std::string> labels;
  for (double v : kEtaValues) labels.push_back("eta=" + format_real(v, 3));
  return labels;
}

/// Chooses eta from {0.1, ..., 1.0}.
class EtaController {
 public:
  EtaController(std::size_t tau, const MetaConfig& cfg)
      : net_(eta_action_labels(), cfg.gamma_meta), window_(tau) {}

  /// Random walk on the eta network; the pick becomes the current eta.
  double select(Rng& rng) {
    current_action_ = net_.select(rng);
    current_eta_ = kEtaValues[current_action_];
    return current_eta_;
  }

  /// Forces a value without consulting the network.
  void force(double eta) {
    current_eta_ = eta;
    const auto it = std::find(kEtaValues.begin(), kEtaValues.end(), eta);
    current_action_ = it == kEtaValues.end() ? kEtaActionCount : static_cast<std::size_t>(it - kEtaValues.begin());
  }

  double eta() const noexcept { return current_eta_; }
  /// Index into kEtaValues, or kEtaActionCount for a forced off-grid value.
  std::size_t action() const noexcept { return current_action_; }
  MetaNetwork& network() noexcept { return net_; }
  const MetaNetwork& network() const noexcept { return net_; }
  WindowAccumulator& window() noexcept { return window_; }
  const WindowAccumulator& window() const noexcept { return window_; }

 private:
  MetaNetwork net_;
  WindowAccumulator window_;
  double current_eta_ = 1.0;
  std::size_t current_action_ = kEtaActionCount - 1;
};

/// Chooses between the reflexive rules I and II once per gamma window.
class GammaController {
 public:
  GammaController(std::size_t tau, const MetaConfig& cfg)
      : net_({"rule-I", "rule-II"}, cfg.gamma_meta), window_(tau), c_gamma_(cfg.c_gamma) {
    if (cfg.rule_bias) {
      net_.set_action_h(0, (*cfg.rule_bias)[0]);
      net_.set_action_h(1, (*cfg.rule_bias)[1]);
    }
  }

  struct StepResult {
    int internal_reward;
    GammaRule rule;
    double gamma;
  };

  /// One activation at a gamma-window boundary: reward the rule chosen at the
  /// previous activation, pick a rule for the coming window and apply it.
  StepResult step(double now, double prev, Rng& rng) {
    const double delta = window_delta(now, prev);
    const int lambda = internal_reward(delta);
    net_.update(lambda);
    const auto rule = static_cast<GammaRule>(net_.select(rng));
    current_gamma_ = apply_rule(rule, current_gamma_, tilde_delta(delta, c_gamma_));
    return {lambda, rule, current_gamma_};
  }

  void set_gamma(double gamma) { current_gamma_ = std::clamp(gamma, 0.0, 1.0); }
  double gamma() const noexcept { return current_gamma_; }
  double c_gamma() const noexcept { return c_gamma_; }
  double rule_one_probability() const { return net_.probability(0); }
  MetaNetwork& network() noexcept { return net_; }
  const MetaNetwork& network() const noexcept { return net_; }
  WindowAccumulator& window() noexcept { return window_; }
  const WindowAccumulator& window() const noexcept { return window_; }

 private:
  MetaNetwork net_;
  WindowAccumulator window_;
  double c_gamma_;
  double current_gamma_ = 0.0;
};

}  // namespace psmeta
