#pragma once

// Invasion game: the attacker shows a direction symbol, then moves. The
// defender is rewarded with 1 for moving the same way. When inverted, the
// attacker moves opposite to its symbol.

#include <array>
#include <string>
#include <vector>

#include "psmeta/env/environment.hpp"

namespace psmeta {

enum class InvasionScheduleKind : std::uint8_t { SinglePhase, FixedPeriod, SuccessThreshold };

struct InvasionSchedule {
  InvasionScheduleKind kind = InvasionScheduleKind::SinglePhase;
  /// FixedPeriod: interactions per phase (last entry repeats).
  std::vector<std::size_t> periods;
  /// SuccessThreshold: invert once analytic success reaches this.
  double threshold = 0.8;
  /// SuccessThreshold: stop after this many completed phases (0 = never).
  std::size_t max_phases = 0;

  static InvasionSchedule single() { return {}; }
  static InvasionSchedule fixed(std::vector<std::size_t> periods) {
    return {InvasionScheduleKind::FixedPeriod, std::move(periods), 0.0, 0};
  }
  static InvasionSchedule success_threshold(double theta, std::size_t max_phases = 0) {
    return {InvasionScheduleKind::SuccessThreshold, {}, theta, max_phases};
  }
};

class InvasionGame {
 public:
  static constexpr std::size_t kLeftSymbol = 0;
  static constexpr std::size_t kRightSymbol = 1;
  static constexpr std::size_t kLeft = 0;
  static constexpr std::size_t kRight = 1;

  explicit InvasionGame(InvasionSchedule schedule = {}) : schedule_(std::move(schedule)) {
    if (schedule_.kind == InvasionScheduleKind::FixedPeriod) clock_ = PhaseClock(schedule_.periods);
  }

  std::size_t reset(Rng& rng) {
    symbol_ = uniform_index(rng, 2);
    return symbol_;
  }

  EnvStep step(std::size_t action, Rng& rng) {
    if (action > 1) throw InvalidActionError("invasion game action must be 0 (left) or 1 (right)");
    EnvStep out;
    out.reward = action == correct_action(symbol_) ? 1.0 : 0.0;
    out.trial_ended = true;
    symbol_ = uniform_index(rng, 2);
    out.next_percept = symbol_;
    return out;
  }

  bool advance_schedule(double analytic_success) {
    switch (schedule_.kind) {
      case InvasionScheduleKind::SinglePhase:
        return false;
      case InvasionScheduleKind::FixedPeriod:
        if (!clock_.tick()) return false;
        break;
      case InvasionScheduleKind::SuccessThreshold:
        if (analytic_success < schedule_.threshold) return false;
        ++phase_;
        break;
    }
    inverted_ = !inverted_;
    return true;
  }

  /// Direction the attacker will move after showing `symbol`.
  std::size_t correct_action(std::size_t symbol) const { return inverted_ ? 1 - symbol : symbol; }

  /// Policy-derived success probability, symbols equally likely.
  double analytic_metric(const Agent& agent) const {
    const std::array<PerceptOutcome, 2> outcomes{{
        {kLeftSymbol, 0.5, 1u << correct_action(kLeftSymbol)},
        {kRightSymbol, 0.5, 1u << correct_action(kRightSymbol)},
    }};
    return analytic_success(agent, outcomes);
  }

  bool inverted() const noexcept { return inverted_; }
  std::size_t phase() const noexcept {
    return schedule_.kind == InvasionScheduleKind::FixedPeriod ? clock_.phase() : phase_;
  }
  bool finished() const noexcept {
    switch (schedule_.kind) {
      case InvasionScheduleKind::FixedPeriod:
        return clock_.finished();
      case InvasionScheduleKind::SuccessThreshold:
        return schedule_.max_phases != 0 && phase_ >= schedule_.max_phases;
      case InvasionScheduleKind::SinglePhase:
        break;
    }
    return false;
  }

  std::size_t percept_count() const noexcept { return 2; }
  std::vector<std::string> action_labels() const { return {"left", "right"}; }
  std::string percept_label(std::size_t p) const { return p == kLeftSymbol ? "⇐" : "⇒"; }
  const InvasionSchedule& schedule() const noexcept { return schedule_; }

 private:
  InvasionSchedule schedule_;
  PhaseClock clock_;
  std::size_t phase_ = 0;
  bool inverted_ = false;
  std::size_t symbol_ = 0;
};

static_assert(Environment<InvasionGame>);

}  // namespace psmeta
