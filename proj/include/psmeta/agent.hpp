#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psmeta/clip_network.hpp"
#include "psmeta/meta_control.hpp"
#include "psmeta/random.hpp"

namespace psmeta {

enum class AgentVariant : std::uint8_t {
  /// Learned eta network and learned gamma rule network.
  FullMeta,
  /// Same gamma network; eta redrawn uniformly at each eta activation, never learned.
  GammaOnlyRandomEta,
  /// gamma and eta drawn once at birth and kept.
  FixedRandomParams,
};

inline std::string_view to_string(AgentVariant v) {
  switch (v) {
    case AgentVariant::FullMeta:
      return "full";
    case AgentVariant::GammaOnlyRandomEta:
      return "gamma_only";
    case AgentVariant::FixedRandomParams:
      return "fixed";
  }
  return "?";
}

inline std::optional<AgentVariant> parse_variant(std::string_view s) {
  if (s == "full") return AgentVariant::FullMeta;
  if (s == "gamma_only") return AgentVariant::GammaOnlyRandomEta;
  if (s == "fixed") return AgentVariant::FixedRandomParams;
  return std::nullopt;
}

enum class MetaParam : std::uint8_t { Eta, Gamma };

inline std::string_view to_string(MetaParam p) { return p == MetaParam::Eta ? "eta" : "gamma"; }

/// One meta-network activation.
struct MetaEvent {
  std::uint64_t t;
  MetaParam xi;
  std::size_t chosen_action;
  int lambda_internal;
  double gamma;
  double eta;
};

/// Weight of one percept in an analytic success estimate, with the set of
/// actions that count as correct for it (bit i = action i).
struct PerceptOutcome {
  std::size_t percept;
  double weight;
  std::uint32_t correct_mask;
};

class Agent {
 public:
  using Labeler = std::function<std::string(std::size_t)>;
  using MetaObserver = std::function<void(const MetaEvent&)>;

  /// `percept_count` is the environment's declared state count S; percept
  /// clips themselves are created lazily on first sight.
  Agent(AgentVariant variant, const std::vector<std::string>& action_labels, std::size_t percept_count,
        const MetaConfig& meta, Rng& rng, Labeler labeler = {})
      : variant_(variant),
        meta_(meta),
        action_count_(action_labels.size()),
        labeler_(std::move(labeler)),
        eta_ctl_(eta_window_length(percept_count, action_labels.size(), meta), meta),
        gamma_ctl_(gamma_window_length(percept_count, action_labels.size(), meta), meta) {
    if (action_labels.empty()) throw StructuralError("agent needs at least one action");
    for (const auto& a : action_labels) actions_.push_back(base_.add_action(a));

    if (meta.initial_eta) {
      eta_ctl_.force(*meta.initial_eta);
    } else {
      eta_ctl_.select(rng);
    }
    gamma_ctl_.set_gamma(meta.initial_gamma ? *meta.initial_gamma : uniform01(rng));
  }

  /// Deliberates on `percept` and returns the chosen action index.
  std::size_t act(std::size_t percept, Rng& rng) {
    if (pending_) throw SequencingError("act called twice without learn");
    base_.walk(percept_clip(percept), rng, trace_);
    base_.refresh_glow(trace_);
    pending_ = true;
    return trace_.action.index;  // action clips were added first, in order
  }

  /// Applies the reward for the last action and runs any meta activations due.
  void learn(double reward, Rng& rng) {
    if (!pending_) throw SequencingError("learn called without a preceding act");
    pending_ = false;
    base_.update_and_damp(reward, gamma_ctl_.gamma(), eta_ctl_.eta());
    ++interactions_;
    if (variant_ == AgentVariant::FixedRandomParams) return;

    const auto eta_closed = eta_ctl_.window().accumulate(reward);
    const auto gamma_closed = gamma_ctl_.window().accumulate(reward);
    if (eta_closed) on_eta_window(*eta_closed, rng);
    if (gamma_closed) on_gamma_window(*gamma_closed, rng);
  }

  /// The task's state count changed: recompute both windows. The partial
  /// window is dropped but the last full one is kept, rescaled, so a drop in
  /// performance across the change still registers.
  void set_percept_count(std::size_t percept_count) {
    eta_ctl_.window().resize(eta_window_length(percept_count, action_count_, meta_));
    gamma_ctl_.window().resize(gamma_window_length(percept_count, action_count_, meta_));
  }

  // --- readouts -----------------------------------------------------------

  double gamma() const noexcept { return gamma_ctl_.gamma(); }
  double eta() const noexcept { return eta_ctl_.eta(); }
  AgentVariant variant() const noexcept { return variant_; }
  std::uint64_t interaction_count() const noexcept { return interactions_; }
  std::size_t action_count() const noexcept { return action_count_; }
  std::size_t eta_window() const noexcept { return eta_ctl_.window().tau(); }
  std::size_t gamma_window() const noexcept { return gamma_ctl_.window().tau(); }

  /// p(action | percept) from the base network; uniform for unseen percepts.
  double action_probability(std::size_t percept, std::size_t action) const {
    if (percept >= percept_clips_.size() || percept_clips_[percept] == kUnregistered) {
      return 1.0 / static_cast<double>(action_count_);
    }
    const auto outs = base_.out_edges(ClipId{percept_clips_[percept]});
    double total = 0.0;
    for (auto e : outs) total += base_.h(e);
    return base_.h(outs[action]) / total;
  }

  std::vector<double> action_probabilities(std::size_t percept) const {
    std::vector<double> p(action_count_);
    for (std::size_t a = 0; a < action_count_; ++a) p[a] = action_probability(percept, a);
    return p;
  }

  double rule_one_probability() const { return gamma_ctl_.rule_one_probability(); }
  std::vector<double> eta_action_probabilities() const { return eta_ctl_.network().probabilities(); }

  const ClipNetwork& base() const noexcept { return base_; }
  ClipNetwork& base() noexcept { return base_; }
  const EtaController& eta_controller() const noexcept { return eta_ctl_; }
  const GammaController& gamma_controller() const noexcept { return gamma_ctl_; }
  GammaController& gamma_controller() noexcept { return gamma_ctl_; }
  EtaController& eta_controller() noexcept { return eta_ctl_; }

  void set_meta_observer(MetaObserver observer) { observer_ = std::move(observer); }

  /// Clip id for an environment percept, registering it with fresh edges to
  /// every action on first use.
  ClipId percept_clip(std::size_t percept) {
    if (percept >= percept_clips_.size()) percept_clips_.resize(percept + 1, kUnregistered);
    auto& slot = percept_clips_[percept];
    if (slot == kUnregistered) {
      std::string label = labeler_ ? labeler_(percept) : "s" + std::to_string(percept);
      slot = base_.add_percept_to(std::move(label), actions_).index;
    }
    return ClipId{slot};
  }

 private:
  static constexpr std::uint32_t kUnregistered = std::numeric_limits<std::uint32_t>::max();

  void on_eta_window(const WindowClosed& closed, Rng& rng) {
    int lambda = 0;
    if (variant_ == AgentVariant::FullMeta && closed.previous) {
      lambda = internal_reward(window_delta(closed.now, *closed.previous));
      eta_ctl_.network().update(lambda);
    }
    eta_ctl_.select(rng);
    notify(MetaParam::Eta, eta_ctl_.action(), lambda);
  }

  void on_gamma_window(const WindowClosed& closed, Rng& rng) {
    // The first window has nothing to be compared with.
    if (!closed.previous) return;
    const auto step = gamma_ctl_.step(closed.now, *closed.previous, rng);
    notify(MetaParam::Gamma, static_cast<std::size_t>(step.rule), step.internal_reward);
  }

  void notify(MetaParam xi, std::size_t action, int lambda) {
    if (observer_) observer_({interactions_, xi, action, lambda, gamma(), eta()});
  }

  AgentVariant variant_;
  MetaConfig meta_;
  std::size_t action_count_;
  Labeler labeler_;
  ClipNetwork base_;
  std::vector<ClipId> actions_;
  std::vector<std::uint32_t> percept_clips_;
  EtaController eta_ctl_;
  GammaController gamma_ctl_;
  WalkTrace trace_;
  bool pending_ = false;
  std::uint64_t interactions_ = 0;
  MetaObserver observer_;
};

/// sum_s P(s) * p(correct(s) | s) from the base network policy.
inline double analytic_success(const Agent& agent, std::span<const PerceptOutcome> outcomes) {
  double total = 0.0;
  for (const auto& o : outcomes) {
    double p = 0.0;
    for (std::size_t a = 0; a < agent.action_count(); ++a) {
      if (o.correct_mask & (1u << a)) p += agent.action_probability(o.percept, a);
    }
    total += o.weight * p;
  }
  return total;
}

}  // namespace psmeta
