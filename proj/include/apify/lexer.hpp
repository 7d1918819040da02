#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apify {

struct Token {
  enum class Kind { word, number, string, picture, period, dot, lparen, rparen, colon, comma, op, eof };
  Kind kind = Kind::eof;
  /// Upper-cased for words; literal content (quotes stripped) for strings.
  std::string text;
  int line = 0;
  /// Copybook the token was expanded from.
  std::optional<std::string> copybook;

  bool is_word(std::string_view w) const { return kind == Kind::word && text == w; }
  bool is_op(std::string_view o) const { return kind == Kind::op && text == o; }
};

/// Returns the text of a copybook, or nothing when it cannot be found.
using CopybookResolver = std::function<std::optional<std::string>(const std::string &name)>;

/// Tokenizes free-format MiniCOBOL. Comment lines start with `*` or `/`;
/// `*>` starts an inline comment.
std::vector<Token> tokenize(std::string_view text);

struct ExpandedTokens {
  std::vector<Token> tokens;
  std::vector<std::string> copybooks_used;
};

/// Tokenizes `text` and splices in every `COPY name.` statement, recursively.
/// Expanded tokens carry the line number of the COPY statement.
ExpandedTokens tokenize_with_copybooks(std::string_view text, const CopybookResolver &resolver);

inline constexpr int max_copy_depth = 8;

} // namespace apify
