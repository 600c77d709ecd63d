#pragma once

#include <optional>
#include <string>
#include <vector>

namespace artimine {

enum class SentryEventKind { on_create, milestone_achieved, task_executed, stage_opened };

// `subject` is a milestone name for milestone_achieved and a stage name for
// task_executed and stage_opened.
struct SentryEvent {
  SentryEventKind kind = SentryEventKind::on_create;
  std::string subject;

  friend bool operator==(const SentryEvent&, const SentryEvent&) = default;
  friend auto operator<=>(const SentryEvent&, const SentryEvent&) = default;
};

enum class AtomKind { achieved, toggled_after, equals };

// achieved:       first.hasBeenAchieved = true   (negated: = false)
// toggled_after:  first.lastToggled > second.lastToggled
// equals:         first = second                 (variable, value)
struct Atom {
  AtomKind kind = AtomKind::equals;
  std::string first, second;
  bool negated = false;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Condition {
  enum class Op { atom, all, any };
  Op op = Op::atom;
  Atom atom;
  std::vector<Condition> children;

  static Condition leaf(Atom a);
  static Condition conjunction(std::vector<Condition> c);
  static Condition disjunction(std::vector<Condition> c);

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Sentry {
  std::optional<SentryEvent> event;
  std::optional<Condition> condition;

  friend bool operator==(const Sentry&, const Sentry&) = default;
};

std::string to_string(const SentryEvent& e);  // "onCreate()", "on XMilestoneAchieved()"
std::string to_string(const Atom& a);
std::string to_string(const Condition& c);
std::string to_string(const Sentry& s);        // "on E() if C", "if C", "onCreate()"

/// Parses the surface syntax produced by to_string. Throws ParseError,
/// including for a sentry with more than one event.
Sentry parse_sentry(const std::string& text);

/// Flattened atoms of a pure conjunction; nullopt when `c` contains OR.
std::optional<std::vector<Atom>> conjunct_atoms(const Condition& c);

}  // namespace artimine
