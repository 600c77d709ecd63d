#include "artimine/sentry.hpp"

#include <cctype>

#include "artimine/error.hpp"

namespace artimine {

Condition Condition::leaf(Atom a) {
  Condition c;
  c.atom = std::move(a);
  return c;
}

Condition Condition::conjunction(std::vector<Condition> children) {
  if (children.size() == 1) return std::move(children.front());
  Condition c;
  c.op = Op::all;
  c.children = std::move(children);
  return c;
}

Condition Condition::disjunction(std::vector<Condition> children) {
  if (children.size() == 1) return std::move(children.front());
  Condition c;
  c.op = Op::any;
  c.children = std::move(children);
  return c;
}

std::string to_string(const SentryEvent& e) {
  switch (e.kind) {
    case SentryEventKind::on_create: return "onCreate()";
    case SentryEventKind::milestone_achieved: return "on " + e.subject + "Achieved()";
    case SentryEventKind::task_executed: return "on " + e.subject + "TaskExecuted()";
    case SentryEventKind::stage_opened: return "on " + e.subject + "Opened()";
  }
  return "";
}

std::string to_string(const Atom& a) {
  switch (a.kind) {
    case AtomKind::achieved: return a.first + ".hasBeenAchieved = " + (a.negated ? "false" : "true");
    case AtomKind::toggled_after: return a.first + ".lastToggled > " + a.second + ".lastToggled";
    case AtomKind::equals: return a.first + (a.negated ? " != " : " = ") + a.second;
  }
  return "";
}

std::string to_string(const Condition& c) {
  if (c.op == Condition::Op::atom) return to_string(c.atom);
  std::string sep = c.op == Condition::Op::all ? " and " : " or ";
  std::string out;
  for (std::size_t i = 0; i < c.children.size(); ++i) {
    const auto& ch = c.children[i];
    bool paren = ch.op != Condition::Op::atom && ch.op != c.op;
    out += (i ? sep : "") + (paren ? "(" + to_string(ch) + ")" : to_string(ch));
  }
  return out;
}

std::string to_string(const Sentry& s) {
  std::string out;
  if (s.event) out = to_string(*s.event);
  if (s.condition) out += (out.empty() ? "if " : " if ") + to_string(*s.condition);
  return out;
}

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip();
    return pos >= text.size();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(0, "sentry '" + text + "': " + what + " at offset " + std::to_string(pos));
  }
  // identifier-like word: letters, digits, '_', '-', '.'-free
  std::string word() {
    skip();
    std::size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ++pos;
      else break;
    }
    if (start == pos) fail("expected a name");
    return text.substr(start, pos - start);
  }
  bool peek_word(const std::string& w) {
    skip();
    if (text.compare(pos, w.size(), w) != 0) return false;
    std::size_t end = pos + w.size();
    return end >= text.size() || !(std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_');
  }
  bool accept_word(const std::string& w) {
    if (!peek_word(w)) return false;
    pos += w.size();
    return true;
  }
  bool accept(const std::string& sym) {
    skip();
    if (text.compare(pos, sym.size(), sym) != 0) return false;
    pos += sym.size();
    return true;
  }
  void expect(const std::string& sym) {
    if (!accept(sym)) fail("expected '" + sym + "'");
  }
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

SentryEvent parse_event_name(Lexer& lx) {
  auto name = lx.word();
  lx.expect("(");
  lx.expect(")");
  if (ends_with(name, "TaskExecuted")) return {SentryEventKind::task_executed, name.substr(0, name.size() - 12)};
  if (ends_with(name, "Achieved")) return {SentryEventKind::milestone_achieved, name.substr(0, name.size() - 8)};
  if (ends_with(name, "Opened")) return {SentryEventKind::stage_opened, name.substr(0, name.size() - 6)};
  lx.fail("unknown event '" + name + "'");
}

Condition parse_or(Lexer& lx);

Condition parse_primary(Lexer& lx) {
  if (lx.accept("(")) {
    auto c = parse_or(lx);
    lx.expect(")");
    return c;
  }
  auto first = lx.word();
  if (lx.accept(".")) {
    auto field = lx.word();
    if (field == "hasBeenAchieved") {
      Atom a{AtomKind::achieved, first, "", false};
      if (lx.accept("=")) {
        auto v = lx.word();
        if (v == "false") a.negated = true;
        else if (v != "true") lx.fail("expected true or false");
      }
      return Condition::leaf(a);
    }
    if (field == "lastToggled") {
      lx.expect(">");
      auto second = lx.word();
      lx.expect(".");
      if (lx.word() != "lastToggled") lx.fail("expected lastToggled");
      return Condition::leaf({AtomKind::toggled_after, first, second, false});
    }
    lx.fail("unknown field '" + field + "'");
  }
  bool negated = false;
  if (lx.accept("!=")) negated = true;
  else lx.expect("=");
  return Condition::leaf({AtomKind::equals, first, lx.word(), negated});
}

Condition parse_and(Lexer& lx) {
  std::vector<Condition> parts{parse_primary(lx)};
  while (lx.accept_word("and")) parts.push_back(parse_primary(lx));
  return Condition::conjunction(std::move(parts));
}

Condition parse_or(Lexer& lx) {
  std::vector<Condition> parts{parse_and(lx)};
  while (lx.accept_word("or")) parts.push_back(parse_and(lx));
  return Condition::disjunction(std::move(parts));
}

}  // namespace

Sentry parse_sentry(const std::string& text) {
  Lexer lx{text};
  Sentry s;
  auto read_event = [&]() -> bool {
    if (lx.accept_word("onCreate")) {
      lx.expect("(");
      lx.expect(")");
      s.event = SentryEvent{SentryEventKind::on_create, ""};
      return true;
    }
    if (lx.accept_word("on")) {
      s.event = parse_event_name(lx);
      return true;
    }
    return false;
  };
  read_event();
  if (lx.peek_word("on") || lx.peek_word("onCreate")) lx.fail("a sentry cannot contain multiple events");
  if (lx.accept_word("if")) s.condition = parse_or(lx);
  if (lx.peek_word("on") || lx.peek_word("onCreate")) lx.fail("a sentry cannot contain multiple events");
  if (!lx.done()) lx.fail("unexpected trailing text");
  if (!s.event && !s.condition) lx.fail("empty sentry");
  return s;
}

std::optional<std::vector<Atom>> conjunct_atoms(const Condition& c) {
  if (c.op == Condition::Op::atom) return std::vector<Atom>{c.atom};
  if (c.op == Condition::Op::any) return std::nullopt;
  std::vector<Atom> out;
  for (const auto& ch : c.children) {
    auto sub = conjunct_atoms(ch);
    if (!sub) return std::nullopt;
    out.insert(out.end(), sub->begin(), sub->end());
  }
  return out;
}

}  // namespace artimine
