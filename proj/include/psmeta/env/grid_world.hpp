#pragma once

// Maze navigation with delayed reward. Map text uses one character per cell:
//   '#' wall, '.' free, 'S' start, 'G' goal (reward 1), 'g' distractor (reward 1/3).
// Reaching G or g ends the trial and puts the agent back on S. Bumping into a
// wall or the border leaves the agent in place.

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmeta/env/environment.hpp"

namespace psmeta {

struct Position {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(Position, Position) = default;
};

enum class Move : std::uint8_t { Left, Right, Up, Down };

inline constexpr double kGoalReward = 1.0;
inline constexpr double kDistractorReward = 1.0 / 3.0;

struct GridMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<char> walls;  // row-major, 1 = wall
  Position start;
  Position goal;
  std::optional<Position> distractor;
  std::size_t goal_distance = 0;
  std::optional<std::size_t> distractor_distance;

  bool inside(Position p) const {
    return p.row >= 0 && p.col >= 0 && static_cast<std::size_t>(p.row) < height &&
           static_cast<std::size_t>(p.col) < width;
  }
  bool is_wall(Position p) const { return walls[index(p)] != 0; }
  std::size_t index(Position p) const { return static_cast<std::size_t>(p.row) * width + static_cast<std::size_t>(p.col); }
  Position position(std::size_t index) const {
    return {static_cast<int>(index / width), static_cast<int>(index % width)};
  }

  /// Where `move` takes an agent standing on `p`.
  Position apply(Position p, Move move) const {
    static constexpr std::array<std::array<int, 2>, 4> kDelta{{{0, -1}, {0, 1}, {-1, 0}, {1, 0}}};
    const auto& d = kDelta[static_cast<std::size_t>(move)];
    const Position next{p.row + d[0], p.col + d[1]};
    if (!inside(next) || is_wall(next)) return p;
    return next;
  }

  bool terminal(Position p) const { return p == goal || (distractor && p == *distractor); }

  std::string render() const {
    std::string out;
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const Position p{static_cast<int>(r), static_cast<int>(c)};
        char ch = is_wall(p) ? '#' : '.';
        if (p == start) ch = 'S';
        if (p == goal) ch = 'G';
        if (distractor && p == *distractor) ch = 'g';
        out += ch;
      }
      out += '\n';
    }
    return out;
  }
};

/// Fewest moves from `from` to `to`. Other terminal cells are not passed
/// through, since stepping on one would end the trial.
inline std::optional<std::size_t> shortest_path(const GridMap& map, Position from, Position to) {
  std::vector<int> dist(map.width * map.height, -1);
  std::deque<Position> queue{from};
  dist[map.index(from)] = 0;
  while (!queue.empty()) {
    const Position p = queue.front();
    queue.pop_front();
    if (p == to) return static_cast<std::size_t>(dist[map.index(p)]);
    if (p != from && map.terminal(p)) continue;
    for (auto m : {Move::Left, Move::Right, Move::Up, Move::Down}) {
      const Position q = map.apply(p, m);
      if (dist[map.index(q)] < 0) {
        dist[map.index(q)] = dist[map.index(p)] + 1;
        queue.push_back(q);
      }
    }
  }
  return std::nullopt;
}

inline GridMap load_map(std::string_view text) {
  std::vector<std::string> rows;
  std::size_t begin = 0;
  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string row(text.substr(begin, end - begin));
    if (!row.empty() && row.back() == '\r') row.pop_back();
    rows.push_back(std::move(row));
    begin = end + 1;
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw MapError("map is empty");

  GridMap map;
  map.height = rows.size();
  map.width = rows.front().size();
  if (map.width == 0) throw MapError("map row 1 is empty");
  map.walls.assign(map.width * map.height, 0);
  int starts = 0, goals = 0, distractors = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != map.width) {
      throw MapError("map row " + std::to_string(r + 1) + " has width " + std::to_string(rows[r].size()) +
                     ", expected " + std::to_string(map.width));
    }
    for (std::size_t c = 0; c < map.width; ++c) {
      const Position p{static_cast<int>(r), static_cast<int>(c)};
      switch (rows[r][c]) {
        case '#':
          map.walls[map.index(p)] = 1;
          break;
        case '.':
          break;
        case 'S':
          map.start = p;
          ++starts;
          break;
        case 'G':
          map.goal = p;
          ++goals;
          break;
        case 'g':
          map.distractor = p;
          ++distractors;
          break;
        default:
          throw MapError("unexpected character '" + std::string(1, rows[r][c]) + "' at row " +
                         std::to_string(r + 1) + ", column " + std::to_string(c + 1));
      }
    }
  }
  if (starts != 1) throw MapError("map needs exactly one start 'S'");
  if (goals != 1) throw MapError("map needs exactly one goal 'G'");
  if (distractors > 1) throw MapError("map allows at most one distractor 'g'");

  const auto goal = shortest_path(map, map.start, map.goal);
  if (!goal) throw MapError("goal is unreachable from start");
  map.goal_distance = *goal;
  if (map.distractor) {
    map.distractor_distance = shortest_path(map, map.start, *map.distractor);
    if (!map.distractor_distance) throw MapError("distractor is unreachable from start");
  }
  return map;
}

class GridWorld {
 public:
  /// Map k is used during phase k; phase lengths are in trials.
  GridWorld(std::vector<GridMap> maps, std::vector<std::size_t> phase_trials)
      : maps_(std::move(maps)), clock_(std::move(phase_trials)) {
    if (maps_.empty()) throw ConfigError("grid world needs at least one map");
    if (clock_.durations().size() != maps_.size()) throw ConfigError("grid world needs one phase length per map");
    for (const auto& m : maps_) {
      if (m.width != maps_[0].width || m.height != maps_[0].height) {
        throw ConfigError("all grid-world phases must use maps of the same size");
      }
    }
    pos_ = map().start;
  }

  explicit GridWorld(GridMap map) : maps_{std::move(map)} { pos_ = maps_[0].start; }

  std::size_t reset(Rng&) {
    pos_ = map().start;
    return map().index(pos_);
  }

  EnvStep step(std::size_t action, Rng&) {
    if (action > 3) throw InvalidActionError("grid-world action must be 0..3 (left, right, up, down)");
    const GridMap& m = map();
    pos_ = m.apply(pos_, static_cast<Move>(action));
    EnvStep out;
    if (pos_ == m.goal) {
      out.reward = kGoalReward;
      out.trial_ended = true;
    } else if (m.distractor && pos_ == *m.distractor) {
      out.reward = kDistractorReward;
      out.trial_ended = true;
    }
    if (out.trial_ended) pos_ = m.start;
    trial_ended_ = out.trial_ended;
    out.next_percept = m.index(pos_);
    return out;
  }

  bool advance_schedule(double) {
    if (!trial_ended_ || clock_.durations().empty()) return false;
    if (!clock_.tick() || clock_.finished()) return false;
    pos_ = map().start;
    return true;
  }

  const GridMap& map() const { return maps_[std::min(clock_.phase(), maps_.size() - 1)]; }
  Position position() const noexcept { return pos_; }
  std::size_t phase() const noexcept { return clock_.phase(); }
  bool finished() const noexcept { return clock_.finished(); }
  std::size_t percept_count() const noexcept { return maps_[0].width * maps_[0].height; }
  std::vector<std::string> action_labels() const { return {"left", "right", "up", "down"}; }
  std::string percept_label(std::size_t p) const {
    const Position pos = maps_[0].position(p);
    return "r" + std::to_string(pos.row) + "c" + std::to_string(pos.col);
  }

 private:
  std::vector<GridMap> maps_;
  PhaseClock clock_;
  Position pos_;
  bool trial_ended_ = false;
};

static_assert(Environment<GridWorld>);

}  // namespace psmeta
