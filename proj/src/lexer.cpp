#include "apify/lexer.hpp"

#include "apify/errors.hpp"

#include <algorithm>
#include <cctype>

namespace apify {
namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    while (pos_ < text_.size()) {
      if (at_line_start_) {
        at_line_start_ = false;
        if (comment_line()) continue;
      }
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
        at_line_start_ = true;
        continue;
      }
      if (is_space(c)) {
        ++pos_;
        continue;
      }
      if (c == '*' && peek(1) == '>') {
        skip_to_eol();
        continue;
      }
      if (expect_picture_) {
        lex_picture();
        continue;
      }
      if (c == '\'' || c == '"') {
        lex_string(c);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
        lex_word_or_number();
        continue;
      }
      // A sign glued to digits after a separator is a signed numeric literal.
      if ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek(1))) != 0 &&
          (pos_ == 0 || is_space(text_[pos_ - 1]) || text_[pos_ - 1] == '(')) {
        ++pos_;
        lex_word_or_number();
        tokens_.back().text.insert(0, 1, c);
        continue;
      }
      if (is_word_char(c)) {
        lex_word_or_number();
        continue;
      }
      lex_punct(c);
    }
    push(Token::Kind::eof, "");
    return std::move(tokens_);
  }

private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  bool separator_follows(std::size_t at) const {
    return at >= text_.size() || is_space(text_[at]);
  }

  bool comment_line() {
    std::size_t p = pos_;
    while (p < text_.size() && text_[p] != '\n' && is_space(text_[p])) ++p;
    if (p < text_.size() && (text_[p] == '*' || text_[p] == '/') &&
        !(text_[p] == '*' && p + 1 < text_.size() && text_[p + 1] == '>')) {
      pos_ = p;
      skip_to_eol();
      return true;
    }
    if (p + 1 < text_.size() && text_[p] == '*' && text_[p + 1] == '>') {
      pos_ = p;
      skip_to_eol();
      return true;
    }
    return false;
  }

  void skip_to_eol() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  void push(Token::Kind kind, std::string text) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line_;
    tokens_.push_back(std::move(t));
  }

  void lex_picture() {
    if (upper(text_.substr(pos_, 2)) == "IS" && separator_follows(pos_ + 2)) {
      push(Token::Kind::word, "IS");
      pos_ += 2;
      return;
    }
    expect_picture_ = false;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    std::string_view pic = text_.substr(start, pos_ - start);
    bool period = false;
    if (!pic.empty() && pic.back() == '.') {
      pic.remove_suffix(1);
      period = true;
    }
    if (pic.empty()) throw SyntaxError(line_, "empty PICTURE string");
    push(Token::Kind::picture, upper(pic));
    if (period) push(Token::Kind::period, ".");
  }

  void lex_string(char quote) {
    std::string value;
    ++pos_;
    for (;;) {
      if (pos_ >= text_.size() || text_[pos_] == '\n')
        throw SyntaxError(line_, "unterminated literal");
      if (text_[pos_] == quote) {
        if (peek(1) == quote) {
          value.push_back(quote);
          pos_ += 2;
          continue;
        }
        ++pos_;
        break;
      }
      value.push_back(text_[pos_++]);
    }
    push(Token::Kind::string, std::move(value));
  }

  void lex_word_or_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    // A trailing hyphen never belongs to a word (e.g. "A -1").
    while (pos_ > start + 1 && text_[pos_ - 1] == '-') --pos_;
    std::string_view w = text_.substr(start, pos_ - start);
    const bool all_digits =
        std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
    if (all_digits) {
      std::string num(w);
      if (pos_ < text_.size() && text_[pos_] == '.' &&
          std::isdigit(static_cast<unsigned char>(peek(1))) != 0) {
        ++pos_;
        const std::size_t frac = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
        num += "." + std::string(text_.substr(frac, pos_ - frac));
      }
      push(Token::Kind::number, std::move(num));
      return;
    }
    std::string word = upper(w);
    if (word == "PIC" || word == "PICTURE") expect_picture_ = true;
    push(Token::Kind::word, std::move(word));
  }

  void lex_punct(char c) {
    switch (c) {
    case '.':
      ++pos_;
      push(separator_follows(pos_) ? Token::Kind::period : Token::Kind::dot, ".");
      return;
    case '(':
      ++pos_;
      push(Token::Kind::lparen, "(");
      return;
    case ')':
      ++pos_;
      push(Token::Kind::rparen, ")");
      return;
    case ':':
      ++pos_;
      push(Token::Kind::colon, ":");
      return;
    case ',':
    case ';':
      ++pos_;
      push(Token::Kind::comma, ",");
      return;
    case '>':
    case '<':
      if (peek(1) == '=') {
        push(Token::Kind::op, std::string{c, '='});
        pos_ += 2;
      } else if (c == '<' && peek(1) == '>') {
        push(Token::Kind::op, "<>");
        pos_ += 2;
      } else {
        push(Token::Kind::op, std::string{c});
        ++pos_;
      }
      return;
    case '*':
      if (peek(1) == '*') {
        push(Token::Kind::op, "**");
        pos_ += 2;
        return;
      }
      [[fallthrough]];
    case '=':
    case '+':
    case '-':
    case '/':
    case '&':
    case '|':
    case '!':
      push(Token::Kind::op, std::string{c});
      ++pos_;
      return;
    default:
      throw SyntaxError(line_, std::string("unexpected character '") + c + "'");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  bool expect_picture_ = false;
  std::vector<Token> tokens_;
};

void expand(std::vector<Token> &out, std::vector<Token> tokens, const CopybookResolver &resolver,
            std::vector<std::string> &stack, std::vector<std::string> &used,
            const std::optional<std::string> &origin, std::optional<int> line_override) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Token &t = tokens[i];
    if (t.kind == Token::Kind::eof) break;
    if (t.is_word("COPY") && i + 1 < tokens.size() &&
        (tokens[i + 1].kind == Token::Kind::word || tokens[i + 1].kind == Token::Kind::string)) {
      const int copy_line = line_override.value_or(t.line);
      const std::string name = upper(tokens[i + 1].text);
      std::size_t next = i + 2;
      if (next < tokens.size() && tokens[next].is_word("REPLACING"))
        throw SyntaxError(copy_line, "COPY REPLACING is not supported");
      if (next < tokens.size() && tokens[next].kind == Token::Kind::period) ++next;
      if (std::find(stack.begin(), stack.end(), name) != stack.end() ||
          static_cast<int>(stack.size()) >= max_copy_depth)
        throw CopybookCycle(name);
      auto text = resolver ? resolver(name) : std::nullopt;
      if (!text) throw MissingCopybook(name);
      if (std::find(used.begin(), used.end(), name) == used.end()) used.push_back(name);
      stack.push_back(name);
      expand(out, Lexer(*text).run(), resolver, stack, used, name, copy_line);
      stack.pop_back();
      i = next - 1;
      continue;
    }
    if (line_override) t.line = *line_override;
    if (origin) t.copybook = origin;
    out.push_back(std::move(t));
  }
}

} // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

ExpandedTokens tokenize_with_copybooks(std::string_view text, const CopybookResolver &resolver) {
  ExpandedTokens result;
  std::vector<std::string> stack;
  auto tokens = Lexer(text).run();
  const int last_line = tokens.empty() ? 1 : tokens.back().line;
  expand(result.tokens, std::move(tokens), resolver, stack, result.copybooks_used, std::nullopt,
         std::nullopt);
  Token eof;
  eof.kind = Token::Kind::eof;
  eof.line = last_line;
  result.tokens.push_back(eof);
  return result;
}

} // namespace apify
