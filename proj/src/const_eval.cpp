#include "apify/const_eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace apify {
namespace {

Truth truth(bool b) { return b ? Truth::yes : Truth::no; }

Truth both(Truth a, Truth b) {
  if (a == Truth::no || b == Truth::no) return Truth::no;
  if (a == Truth::yes && b == Truth::yes) return Truth::yes;
  return Truth::unknown;
}

Truth either(Truth a, Truth b) {
  if (a == Truth::yes || b == Truth::yes) return Truth::yes;
  if (a == Truth::no && b == Truth::no) return Truth::no;
  return Truth::unknown;
}

Truth negate(Truth t) {
  if (t == Truth::unknown) return t;
  return t == Truth::yes ? Truth::no : Truth::yes;
}

struct PictureShape {
  std::size_t digits = 0;
  bool is_signed = false;
  bool numeric = true;
  bool scaled = false;
};

PictureShape shape(const std::string &pic) {
  PictureShape s;
  for (std::size_t i = 0; i < pic.size(); ++i) {
    const char c = pic[i];
    std::size_t repeat = 1;
    if (i + 1 < pic.size() && pic[i + 1] == '(') {
      const auto close = pic.find(')', i);
      repeat = static_cast<std::size_t>(std::strtoul(pic.c_str() + i + 2, nullptr, 10));
      i = close;
    }
    if (c == '9')
      s.digits += repeat;
    else if (c == 'S')
      s.is_signed = true;
    else if (c == 'V' || c == 'P')
      s.scaled = true;
    else
      s.numeric = false;
  }
  return s;
}

bool plain_integer(const std::string &text, bool &negative, std::string &digits) {
  std::size_t i = 0;
  negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  if (i == text.size()) return false;
  for (std::size_t j = i; j < text.size(); ++j)
    if (text[j] < '0' || text[j] > '9') return false;
  digits = text.substr(i);
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  return true;
}

// Value an elementary item holds after MOVE lit TO item, when it can be
// stated without picture editing or truncation.
std::optional<Literal> stored_value(const DataItem &item, const Literal &lit) {
  const auto s = shape(*item.picture);
  if (s.numeric && !s.scaled) {
    if (lit.kind == Literal::Kind::zero) return Literal{Literal::Kind::numeric, "0"};
    if (lit.kind != Literal::Kind::numeric) return std::nullopt;
    bool negative = false;
    std::string digits;
    if (!plain_integer(lit.text, negative, digits)) return std::nullopt;
    if (negative && !s.is_signed) return std::nullopt;
    if (digits.size() > s.digits) return std::nullopt;
    if (digits == "0") negative = false;
    return Literal{Literal::Kind::numeric, (negative ? "-" : "") + digits};
  }
  if (s.numeric) return std::nullopt;
  if (item.usage != Usage::display) return std::nullopt;
  switch (lit.kind) {
  case Literal::Kind::space:
    return lit;
  case Literal::Kind::zero:
    return Literal{Literal::Kind::alphanumeric, std::string(item.byte_size, '0')};
  case Literal::Kind::alphanumeric:
    if (lit.text.size() > item.byte_size) return std::nullopt;
    return lit;
  case Literal::Kind::numeric: {
    bool negative = false;
    std::string digits;
    if (!plain_integer(lit.text, negative, digits) || negative || lit.text.size() > item.byte_size)
      return std::nullopt;
    return Literal{Literal::Kind::alphanumeric, lit.text};
  }
  default:
    return std::nullopt;
  }
}

std::string rtrim(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

} // namespace

Truth compare_literals(const Literal &a, RelOp op, const Literal &b) {
  using K = Literal::Kind;
  auto decide_equality = [&](bool equal) -> Truth {
    if (op == RelOp::eq) return truth(equal);
    if (op == RelOp::ne) return truth(!equal);
    return Truth::unknown;
  };
  auto numeric_value = [](const Literal &l) -> std::optional<long double> {
    if (l.kind == K::zero) return 0.0L;
    if (l.kind != K::numeric) return std::nullopt;
    char *end = nullptr;
    const long double v = std::strtold(l.text.c_str(), &end);
    if (end == nullptr || *end != '\0') return std::nullopt;
    return v;
  };
  const auto x = numeric_value(a);
  const auto y = numeric_value(b);
  if (x && y && (a.kind == K::numeric || b.kind == K::numeric || (a.kind == K::zero && b.kind == K::zero))) {
    switch (op) {
    case RelOp::eq:
      return truth(*x == *y);
    case RelOp::ne:
      return truth(*x != *y);
    case RelOp::lt:
      return truth(*x < *y);
    case RelOp::le:
      return truth(*x <= *y);
    case RelOp::gt:
      return truth(*x > *y);
    case RelOp::ge:
      return truth(*x >= *y);
    }
  }
  auto as_text = [](const Literal &l, const Literal &other) -> std::optional<std::string> {
    if (l.kind == K::alphanumeric) return rtrim(l.text);
    if (l.kind == K::space) return std::string();
    if (l.kind == K::zero && other.kind == K::alphanumeric) {
      if (other.text.empty() || other.text.find_first_not_of('0') != std::string::npos) return std::string("#");
      return rtrim(other.text);
    }
    return std::nullopt;
  };
  if (a.kind == K::zero && b.kind == K::alphanumeric) {
    const bool zeros = !b.text.empty() && b.text.find_first_not_of('0') == std::string::npos;
    return decide_equality(zeros);
  }
  if (b.kind == K::zero && a.kind == K::alphanumeric) return compare_literals(b, op, a);
  const auto s = as_text(a, b);
  const auto t = as_text(b, a);
  if (s && t) return decide_equality(*s == *t);
  return Truth::unknown;
}

void ConstEnv::forget_overlapping(ItemId item) {
  std::erase_if(values_, [&](const auto &e) { return unit_->overlaps(e.first, item); });
  std::erase_if(excluded_, [&](const auto &e) { return unit_->overlaps(e.first, item); });
}

bool ConstEnv::trackable(const Operand &op) const {
  if (!op.is_item() || !op.subscript_reads.empty()) return false;
  if (!unit_->item(op.item).is_elementary()) return false;
  for (std::optional<ItemId> cur = op.item; cur; cur = unit_->item(*cur).parent)
    if (unit_->item(*cur).occurs) return false;
  return true;
}

void ConstEnv::assume_equal(ItemId item, const Literal &lit) {
  if (values_.contains(item)) return;
  if (auto v = stored_value(unit_->item(item), lit)) {
    values_[item] = *v;
    excluded_.erase(item);
  }
}

void ConstEnv::assume_unequal(ItemId item, const Literal &lit) {
  if (values_.contains(item)) return;
  const auto v = stored_value(unit_->item(item), lit);
  if (!v) return;
  auto &list = excluded_[item];
  if (std::find(list.begin(), list.end(), *v) == list.end()) list.push_back(*v);
}

bool ConstEnv::excludes(const Operand &item, const Operand &literal) const {
  if (literal.kind != Operand::Kind::literal || !trackable(item)) return false;
  auto it = excluded_.find(item.item);
  if (it == excluded_.end()) return false;
  const auto v = stored_value(unit_->item(item.item), literal.literal);
  if (!v) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const Literal &e) { return compare_literals(e, RelOp::eq, *v) == Truth::yes; });
}

void ConstEnv::assume(const Condition &c, bool outcome) {
  switch (c.kind) {
  case Condition::Kind::compare: {
    if (c.op != RelOp::eq && c.op != RelOp::ne) return;
    const bool equal = (c.op == RelOp::eq) == outcome;
    const Operand *item = &c.lhs;
    const Operand *lit = &c.rhs;
    if (lit->kind != Operand::Kind::literal) std::swap(item, lit);
    if (lit->kind != Operand::Kind::literal || !trackable(*item)) return;
    if (equal)
      assume_equal(item->item, lit->literal);
    else
      assume_unequal(item->item, lit->literal);
    return;
  }
  case Condition::Kind::condition_name: {
    const auto &cond = unit_->item(c.condition_item);
    Operand parent;
    parent.kind = Operand::Kind::item;
    parent.item = *cond.parent;
    if (!trackable(parent)) return;
    if (outcome) {
      if (cond.condition_values.size() == 1 && !cond.condition_values[0].high)
        assume_equal(parent.item, cond.condition_values[0].low);
    } else {
      for (const auto &cv : cond.condition_values)
        if (!cv.high) assume_unequal(parent.item, cv.low);
    }
    return;
  }
  case Condition::Kind::negation:
    assume(c.operands[0], !outcome);
    return;
  case Condition::Kind::all_of:
    if (outcome)
      for (const auto &sub : c.operands) assume(sub, true);
    return;
  case Condition::Kind::any_of:
    if (!outcome)
      for (const auto &sub : c.operands) assume(sub, false);
    return;
  case Condition::Kind::class_test:
    return;
  }
}

void ConstEnv::meet(const ConstEnv &other) {
  std::erase_if(values_, [&](const auto &e) {
    auto it = other.values_.find(e.first);
    return it == other.values_.end() || !(it->second == e.second);
  });
  for (auto it = excluded_.begin(); it != excluded_.end();) {
    auto o = other.excluded_.find(it->first);
    if (o != other.excluded_.end())
      std::erase_if(it->second, [&](const Literal &l) {
        return std::find(o->second.begin(), o->second.end(), l) == o->second.end();
      });
    if (o == other.excluded_.end() || it->second.empty())
      it = excluded_.erase(it);
    else
      ++it;
  }
}

void ConstEnv::apply(const Statement &s, const ItemSet &kill) {
  kill.for_each([&](ItemId id) { forget_overlapping(id); });
  if (s.kind != StmtKind::move || s.sources.empty() || s.sources[0].kind != Operand::Kind::literal) return;
  for (const auto &t : s.targets) {
    if (!t.is_item() || !t.subscript_reads.empty()) continue;
    const auto &item = unit_->item(t.item);
    if (!item.is_elementary()) continue;
    bool repeated = false;
    for (std::optional<ItemId> cur = t.item; cur; cur = unit_->item(*cur).parent)
      repeated = repeated || unit_->item(*cur).occurs.has_value();
    if (repeated || !kill.contains(t.item)) continue;
    if (auto v = stored_value(item, s.sources[0].literal)) values_[t.item] = *v;
  }
}

std::optional<Literal> ConstEnv::value(ItemId item) const {
  auto it = values_.find(item);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<Literal> ConstEnv::operand_value(const Operand &op) const {
  if (op.kind == Operand::Kind::literal) return op.literal;
  if (op.kind == Operand::Kind::item && op.subscript_reads.empty()) return value(op.item);
  return std::nullopt;
}

Truth ConstEnv::compare(const Operand &lhs, RelOp op, const Operand &rhs) const {
  const auto a = operand_value(lhs);
  const auto b = operand_value(rhs);
  if (!a || !b) {
    if ((op == RelOp::eq || op == RelOp::ne) && (excludes(lhs, rhs) || excludes(rhs, lhs)))
      return truth(op == RelOp::ne);
    return Truth::unknown;
  }
  return compare_literals(*a, op, *b);
}

Truth ConstEnv::eval(const Condition &c) const {
  switch (c.kind) {
  case Condition::Kind::compare:
    return compare(c.lhs, c.op, c.rhs);
  case Condition::Kind::condition_name: {
    const auto &cond = unit_->item(c.condition_item);
    const auto v = value(*cond.parent);
    if (!v) return Truth::unknown;
    Truth any = Truth::no;
    for (const auto &cv : cond.condition_values) {
      const Truth hit = cv.high ? both(compare_literals(*v, RelOp::ge, cv.low), compare_literals(*v, RelOp::le, *cv.high))
                                : compare_literals(*v, RelOp::eq, cv.low);
      any = either(any, hit);
    }
    return any;
  }
  case Condition::Kind::class_test:
    return Truth::unknown;
  case Condition::Kind::all_of: {
    Truth t = Truth::yes;
    for (const auto &sub : c.operands) t = both(t, eval(sub));
    return t;
  }
  case Condition::Kind::any_of: {
    Truth t = Truth::no;
    for (const auto &sub : c.operands) t = either(t, eval(sub));
    return t;
  }
  case Condition::Kind::negation:
    return negate(eval(c.operands[0]));
  }
  return Truth::unknown;
}

Truth ConstEnv::matches(const Operand &subject, const WhenChoice &choice) const {
  switch (choice.kind) {
  case WhenChoice::Kind::any:
    return Truth::yes;
  case WhenChoice::Kind::value:
    return compare(subject, RelOp::eq, choice.value);
  case WhenChoice::Kind::range:
    return both(compare(subject, RelOp::ge, choice.value), compare(subject, RelOp::le, choice.thru));
  case WhenChoice::Kind::condition:
    return eval(choice.condition);
  }
  return Truth::unknown;
}

std::vector<std::pair<StmtId, ConstEnv>> ConstEnv::feasible_successors(const Cfg &cfg, StmtId node) const {
  const auto &st = unit_->stmt(node);
  std::map<StmtId, ConstEnv> out;
  auto take = [&](const Branch &b, const ConstEnv &env) {
    for (auto t : b.targets) {
      auto [it, fresh] = out.emplace(t, env);
      if (!fresh) it->second.meet(env);
    }
  };
  const auto &branches = cfg.branches(node);
  if (st.kind == StmtKind::if_) {
    const Truth t = eval(*st.condition);
    for (const auto &b : branches) {
      if (b.kind == Branch::Kind::if_true && t != Truth::no) {
        ConstEnv env = *this;
        env.assume(*st.condition, true);
        take(b, env);
      } else if (b.kind == Branch::Kind::if_false && t != Truth::yes) {
        ConstEnv env = *this;
        env.assume(*st.condition, false);
        take(b, env);
      }
    }
  } else if (st.kind == StmtKind::evaluate_when) {
    // `rest` holds the facts implied by every earlier arm failing to match.
    ConstEnv rest = *this;
    const bool item_subject = st.subject && rest.trackable(*st.subject);
    for (const auto &b : branches) {
      if (b.kind == Branch::Kind::no_match) {
        take(b, rest);
        break;
      }
      const auto &arm = st.arms[b.arm];
      Truth m = arm.other ? Truth::yes : Truth::no;
      for (const auto &choice : arm.choices) {
        const Truth hit = st.subject ? rest.matches(*st.subject, choice)
                                     : (choice.kind == WhenChoice::Kind::condition ? rest.eval(choice.condition)
                                                                                   : Truth::unknown);
        m = either(m, hit);
      }
      if (m != Truth::no) {
        ConstEnv env = rest;
        if (!arm.other && arm.choices.size() == 1) {
          const auto &choice = arm.choices[0];
          if (item_subject && choice.kind == WhenChoice::Kind::value &&
              choice.value.kind == Operand::Kind::literal)
            env.assume_equal(st.subject->item, choice.value.literal);
          else if (!st.subject && choice.kind == WhenChoice::Kind::condition)
            env.assume(choice.condition, true);
        }
        take(b, env);
      }
      if (m == Truth::yes) break;
      for (const auto &choice : arm.choices) {
        if (item_subject && choice.kind == WhenChoice::Kind::value && choice.value.kind == Operand::Kind::literal)
          rest.assume_unequal(st.subject->item, choice.value.literal);
        else if (!st.subject && choice.kind == WhenChoice::Kind::condition)
          rest.assume(choice.condition, false);
      }
    }
  } else {
    for (const auto &b : branches) take(b, *this);
  }
  return {out.begin(), out.end()};
}

} // namespace apify
