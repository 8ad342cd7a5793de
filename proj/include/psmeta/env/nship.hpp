#pragma once

// n-ship game: ships arrive one at a time. Blocking one of the first n-1
// ships pays 1 immediately; blocking only the last ship pays 5(n-1).
// A game always runs through all n ships.

#include <span>
#include <string>
#include <vector>

#include "psmeta/env/environment.hpp"

namespace psmeta {

enum class PhaseUnit : std::uint8_t { Trials, Interactions };

/// Expected reward of one game when ship i is blocked with probability p[i].
/// For n = 1 a block pays 1, so the expectation is p[0].
inline double nship_expected_reward(std::span<const double> p_block) {
  const std::size_t n = p_block.size();
  if (n == 0) return 0.0;
  if (n == 1) return p_block[0];
  double early = 0.0;
  double none_blocked = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    early += p_block[i];
    none_blocked *= 1.0 - p_block[i];
  }
  return early + none_blocked * p_block[n - 1] * 5.0 * static_cast<double>(n - 1);
}

inline double nship_big_reward(std::size_t n) { return 5.0 * static_cast<double>(n - 1); }
inline double nship_optimal_reward(std::size_t n) { return n == 1 ? 1.0 : nship_big_reward(n); }
inline double nship_greedy_reward(std::size_t n) { return n == 1 ? 1.0 : static_cast<double>(n - 1); }
inline double nship_random_reward(std::size_t n) {
  const std::vector<double> half(n, 0.5);
  return nship_expected_reward(half);
}

struct NShipSchedule {
  std::size_t n_start = 1;
  std::size_t n_end = 1;
  /// Duration of the phase for n_start, n_start + 1, ..., n_end.
  std::vector<std::size_t> durations;
  PhaseUnit unit = PhaseUnit::Trials;
};

class NShipGame {
 public:
  static constexpr std::size_t kBlock = 0;
  static constexpr std::size_t kPass = 1;

  explicit NShipGame(NShipSchedule schedule) : schedule_(std::move(schedule)), n_(schedule_.n_start) {
    if (schedule_.n_start == 0 || schedule_.n_end < schedule_.n_start) {
      throw ConfigError("n-ship game needs 1 <= n_start <= n_end");
    }
    if (!schedule_.durations.empty() && schedule_.durations.size() != schedule_.n_end - schedule_.n_start + 1) {
      throw ConfigError("n-ship schedule needs one duration per n");
    }
  }

  /// Single-phase game with n ships.
  explicit NShipGame(std::size_t n) : NShipGame(NShipSchedule{n, n, {}, PhaseUnit::Trials}) {}

  std::size_t reset(Rng&) {
    ship_ = 0;
    blocked_early_ = false;
    return ship_;
  }

  EnvStep step(std::size_t action, Rng&) {
    if (action > 1) throw InvalidActionError("n-ship action must be 0 (block) or 1 (pass)");
    const bool block = action == kBlock;
    EnvStep out;
    if (n_ == 1) {
      out.reward = block ? 1.0 : 0.0;
    } else if (ship_ + 1 < n_) {
      if (block) {
        out.reward = 1.0;
        blocked_early_ = true;
      }
    } else if (block && !blocked_early_) {
      out.reward = nship_big_reward(n_);
    }
    if (++ship_ == n_) {
      out.trial_ended = true;
      ship_ = 0;
      blocked_early_ = false;
    }
    trial_ended_ = out.trial_ended;
    out.next_percept = ship_;
    return out;
  }

  bool advance_schedule(double) {
    if (schedule_.durations.empty() || finished_) return false;
    if (schedule_.unit == PhaseUnit::Interactions || trial_ended_) ++elapsed_;
    // n only changes between games.
    if (!trial_ended_ || elapsed_ < schedule_.durations[n_ - schedule_.n_start]) return false;
    elapsed_ = 0;
    if (n_ == schedule_.n_end) {
      finished_ = true;
      return false;
    }
    ++n_;
    return true;
  }

  double analytic_metric(const Agent& agent) const {
    std::vector<double> p(n_);
    for (std::size_t i = 0; i < n_; ++i) p[i] = agent.action_probability(i, kBlock);
    return nship_expected_reward(p);
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t ship() const noexcept { return ship_; }
  bool blocked_early() const noexcept { return blocked_early_; }
  std::size_t phase() const noexcept { return n_ - schedule_.n_start; }
  bool finished() const noexcept { return finished_; }
  std::size_t percept_count() const noexcept { return n_; }
  std::vector<std::string> action_labels() const { return {"block", "pass"}; }
  std::string percept_label(std::size_t p) const { return "ship" + std::to_string(p + 1); }
  const NShipSchedule& schedule() const noexcept { return schedule_; }

 private:
  NShipSchedule schedule_;
  std::size_t n_;
  std::size_t ship_ = 0;
  bool blocked_early_ = false;
  bool trial_ended_ = false;
  std::size_t elapsed_ = 0;
  bool finished_ = false;
};

static_assert(Environment<NShipGame>);

}  // namespace psmeta
