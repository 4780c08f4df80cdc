#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace colorgrid {

inline constexpr int kNumColors = 3;
inline constexpr int kNumActions = 4;

/// One of the three block colors.
struct BlockColor {
  std::uint8_t index = 0;

  constexpr BlockColor() = default;
  constexpr explicit BlockColor(int i) : index(static_cast<std::uint8_t>(i)) {}

  friend constexpr bool operator==(BlockColor, BlockColor) = default;
};

enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr std::array<Action, kNumActions> kAllActions{Action::Up, Action::Down,
                                                             Action::Left, Action::Right};

enum class Role : std::uint8_t { Leader, Follower };

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(Cell, Cell) = default;
  friend constexpr auto operator<=>(Cell, Cell) = default;
};

constexpr int manhattan(Cell a, Cell b) noexcept {
  return (a.row > b.row ? a.row - b.row : b.row - a.row) +
         (a.col > b.col ? a.col - b.col : b.col - a.col);
}

constexpr Cell offset(Cell c, Action a) noexcept {
  switch (a) {
    case Action::Up: return {c.row - 1, c.col};
    case Action::Down: return {c.row + 1, c.col};
    case Action::Left: return {c.row, c.col - 1};
    case Action::Right: return {c.row, c.col + 1};
  }
  return c;
}

constexpr char action_char(Action a) noexcept {
  constexpr std::array<char, kNumActions> chars{'U', 'D', 'L', 'R'};
  return chars[static_cast<int>(a)];
}

inline std::optional<Action> action_from_char(char c) noexcept {
  switch (c) {
    case 'U': return Action::Up;
    case 'D': return Action::Down;
    case 'L': return Action::Left;
    case 'R': return Action::Right;
    default: return std::nullopt;
  }
}

/// Raised for any configuration that cannot produce a valid environment.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace colorgrid
