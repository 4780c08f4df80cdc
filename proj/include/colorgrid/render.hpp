#pragma once

#include <ostream>
#include <string>

#include "colorgrid/config.hpp"
#include "colorgrid/state.hpp"

namespace colorgrid {

// ASCII frame: '.' empty, '0'..'2' blocks, 'L' leader, 'F' follower.
// With ansi=true blocks of the goal color are drawn in reverse video;
// the goal is always named on the header line.
inline void render_frame(const GridState& s, const EnvConfig& cfg, std::ostream& os, bool ansi = false) {
  os << "t=" << s.timestep << " goal=" << static_cast<int>(s.goal.index) << '\n';
  for (int r = 0; r < s.height; ++r) {
    std::string line;
    line.reserve(static_cast<std::size_t>(s.width) * 2);
    for (int c = 0; c < s.width; ++c) {
      const Cell cell{r, c};
      if (const int a = s.agent_at(cell); a >= 0) {
        line.push_back(cfg.is_leader(a) ? 'L' : 'F');
      } else if (s.has_block(cell)) {
        const auto b = s.block_at(cell);
        const char digit = static_cast<char>('0' + b);
        if (ansi && b == s.goal.index) {
          line += "\x1b[7m";
          line.push_back(digit);
          line += "\x1b[0m";
        } else {
          line.push_back(digit);
        }
      } else {
        line.push_back('.');
      }
    }
    os << line << '\n';
  }
}

}  // namespace colorgrid
