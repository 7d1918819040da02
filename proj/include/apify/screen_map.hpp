#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace apify {

enum class Direction { input, output, both };

std::string_view to_string(Direction d);

struct ScreenField {
  std::string name;
  Direction direction = Direction::input;
  int row = 0;
  int col = 0;
  int length = 1;

  bool accepts_input() const { return direction != Direction::output; }
  bool shows_output() const { return direction != Direction::input; }
  bool operator==(const ScreenField &) const = default;
};

/// A BMS-style screen map. Map field N corresponds to the symbolic-map items
/// N, N+"I" (input) and N+"O" (output).
struct ScreenMap {
  std::string name;
  std::vector<ScreenField> fields;
};

/// Parses "NAME ROW r COL c LEN n (IN|OUT|INOUT)" lines; '*' starts a comment
/// line and blank lines are ignored.
std::vector<ScreenField> parse_screen_map(std::string_view text);

} // namespace apify
