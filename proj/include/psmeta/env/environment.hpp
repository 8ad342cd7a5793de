#pragma once

#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include "psmeta/agent.hpp"
#include "psmeta/error.hpp"
#include "psmeta/random.hpp"

namespace psmeta {

struct EnvStep {
  double reward = 0.0;
  bool trial_ended = false;
  std::size_t next_percept = 0;
};

/// What the ensemble runner needs from a task.
///
/// `step` applies the reward rule; `advance_schedule` is called once per
/// interaction after the agent has learned and metrics have been recorded,
/// and moves the phase schedule on. It returns true when the phase changed.
template <class E>
concept Environment = requires(E env, const E cenv, Rng& rng, std::size_t i, double x, const Agent& agent) {
  { env.reset(rng) } -> std::same_as<std::size_t>;
  { env.step(i, rng) } -> std::same_as<EnvStep>;
  { env.advance_schedule(x) } -> std::same_as<bool>;
  { cenv.percept_count() } -> std::convertible_to<std::size_t>;
  { cenv.action_labels() } -> std::convertible_to<std::vector<std::string>>;
  { cenv.percept_label(i) } -> std::convertible_to<std::string>;
  { cenv.phase() } -> std::convertible_to<std::size_t>;
  { cenv.finished() } -> std::convertible_to<bool>;
};

/// Counts interactions or trials against a list of phase durations. The last
/// duration repeats if the clock runs past the list.
class PhaseClock {
 public:
  PhaseClock() = default;
  explicit PhaseClock(std::vector<std::size_t> durations) : durations_(std::move(durations)) {
    if (durations_.empty()) throw ConfigError("phase schedule needs at least one duration");
    for (auto d : durations_) {
      if (d == 0) throw ConfigError("phase durations must be positive");
    }
  }

  /// Advances by one unit; true when that unit completed the current phase.
  bool tick() {
    if (durations_.empty()) return false;
    if (++elapsed_ < duration(phase_)) return false;
    elapsed_ = 0;
    ++phase_;
    return true;
  }

  std::size_t phase() const noexcept { return phase_; }
  std::size_t elapsed() const noexcept { return elapsed_; }
  std::size_t duration(std::size_t phase) const {
    return phase < durations_.size() ? durations_[phase] : durations_.back();
  }
  const std::vector<std::size_t>& durations() const noexcept { return durations_; }
  /// True once every listed phase has run to completion.
  bool finished() const noexcept { return !durations_.empty() && phase_ >= durations_.size(); }

 private:
  std::vector<std::size_t> durations_;
  std::size_t phase_ = 0;
  std::size_t elapsed_ = 0;
};

}  // namespace psmeta
