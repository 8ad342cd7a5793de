#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "psmeta/ensemble.hpp"

namespace psmeta {

/// Start and one-past-end record indices of each phase, read off the
/// "phase" column. A series without that column is one phase.
inline std::vector<std::pair<std::size_t, std::size_t>> phase_ranges(const TimeSeries& ts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (ts.size() == 0) return out;
  if (!ts.has("phase")) return {{0, ts.size()}};
  const auto& phase = ts.column("phase");
  std::size_t begin = 0;
  for (std::size_t r = 1; r < ts.size(); ++r) {
    if (phase[r] != phase[r - 1]) {
      out.emplace_back(begin, r);
      begin = r;
    }
  }
  out.emplace_back(begin, ts.size());
  return out;
}

/// Per phase, how far along the axis the series ran before `column` first
/// reached `target` (0 if it starts there). Phases that never reach it
/// report their full length.
inline std::vector<std::size_t> learning_time(const TimeSeries& ts, double target,
                                              std::string_view column = "success") {
  const auto& values = ts.column(column);
  std::vector<std::size_t> out;
  for (auto [begin, end] : phase_ranges(ts)) {
    const double origin = begin == 0 ? 0.0 : ts.axis_values[begin - 1];
    std::size_t time = static_cast<std::size_t>(ts.axis_values[end - 1] - origin);
    for (std::size_t r = begin; r < end; ++r) {
      if (values[r] >= target) {
        time = static_cast<std::size_t>(ts.axis_values[r] - ts.axis_values[begin]);
        break;
      }
    }
    out.push_back(time);
  }
  return out;
}

/// Mean of `column` over records [begin, end).
inline double mean_over(const TimeSeries& ts, std::string_view column, std::size_t begin, std::size_t end) {
  const auto& v = ts.column(column);
  double total = 0.0;
  for (std::size_t r = begin; r < end; ++r) total += v[r];
  return end > begin ? total / static_cast<double>(end - begin) : 0.0;
}

}  // namespace psmeta
