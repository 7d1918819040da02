#include "apify/screen_map.hpp"

#include "apify/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace apify {

std::string_view to_string(Direction d) {
  switch (d) {
  case Direction::input:
    return "input";
  case Direction::output:
    return "output";
  case Direction::both:
    return "both";
  }
  return "input";
}

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

int positive(const std::string &word, int line, const char *what) {
  int value = 0;
  const auto *end = word.data() + word.size();
  auto [ptr, ec] = std::from_chars(word.data(), end, value);
  if (ec != std::errc{} || ptr != end || value <= 0)
    throw MapSyntaxError(line, std::string(what) + " must be a positive integer, got '" + word + "'");
  return value;
}

} // namespace

std::vector<ScreenField> parse_screen_map(std::string_view text) {
  std::vector<ScreenField> fields;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos || raw[first] == '*') continue;

    std::istringstream words(raw);
    std::vector<std::string> w;
    for (std::string s; words >> s;) w.push_back(upper(s));
    if (w.size() != 8 || w[1] != "ROW" || w[3] != "COL" || w[5] != "LEN")
      throw MapSyntaxError(line, "expected 'name ROW r COL c LEN n IN|OUT|INOUT'");

    ScreenField f;
    f.name = w[0];
    f.row = positive(w[2], line, "ROW");
    f.col = positive(w[4], line, "COL");
    f.length = positive(w[6], line, "LEN");
    if (w[7] == "IN")
      f.direction = Direction::input;
    else if (w[7] == "OUT")
      f.direction = Direction::output;
    else if (w[7] == "INOUT")
      f.direction = Direction::both;
    else
      throw MapSyntaxError(line, "unknown direction '" + w[7] + "'");
    if (std::any_of(fields.begin(), fields.end(), [&](const ScreenField &g) { return g.name == f.name; }))
      throw MapSyntaxError(line, "duplicate field " + f.name);
    fields.push_back(std::move(f));
  }
  return fields;
}

} // namespace apify
