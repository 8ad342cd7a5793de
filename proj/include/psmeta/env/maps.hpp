#pragma once

// Built-in grid-world layouts. (a) is the classic 9x6 maze; (b) moves its
// interior walls; (c) is (a) with a distractor reward. The same layouts ship
// as text files under data/maps/ and can be replaced there.

#include <string>
#include <string_view>

#include "psmeta/env/grid_world.hpp"

namespace psmeta {

inline constexpr std::string_view kMapA =
    ".......#G\n"
    "..#....#.\n"
    "S.#....#.\n"
    "..#......\n"
    ".....#...\n"
    ".........\n";

inline constexpr std::string_view kMapB =
    ".......#G\n"
    "...#...#.\n"
    "S..#.....\n"
    "...#...#.\n"
    ".....#.#.\n"
    ".........\n";

inline constexpr std::string_view kMapC =
    ".......#G\n"
    "..#....#.\n"
    "S.#....#.\n"
    "..#......\n"
    ".....#..g\n"
    ".........\n";

inline constexpr std::size_t kShippedGoalDistance = 14;
inline constexpr std::size_t kShippedDistractorDistance = 12;

inline std::string_view shipped_map_text(char id) {
  switch (id) {
    case 'a':
      return kMapA;
    case 'b':
      return kMapB;
    case 'c':
      return kMapC;
  }
  throw LookupError(std::string("no shipped map '") + id + "'");
}

/// Loads one of the shipped layouts and checks its path lengths.
inline GridMap shipped_map(char id) {
  GridMap map = load_map(shipped_map_text(id));
  if (map.goal_distance != kShippedGoalDistance) {
    throw MapError(std::string("shipped map ") + id + ": goal is " + std::to_string(map.goal_distance) +
                   " steps away, expected 14");
  }
  if (map.distractor && map.distractor_distance != kShippedDistractorDistance) {
    throw MapError(std::string("shipped map ") + id + ": distractor is not 12 steps away");
  }
  return map;
}

}  // namespace psmeta
