#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adjoint {

enum class Errc {
  not_a_poset,
  not_a_lattice,
  too_large,
  too_many_worlds,
  duplicate_label,
  unknown_label,
  empty_carrier,
  foreign_element,
  not_distributive,
  not_boolean,
  missing_generator,
  not_a_generator,
  duplicate_generator,
  not_join_preserving,
  not_meet_preserving,
  lattice_mismatch,
  unknown_agent,
  unknown_action,
  empty_group,
  no_agents,
  incomplete_action_appearance,
  empty_action_set,
  word_length_exceeded,
  generator_mismatch,
  axiom_violation,
  parse_error,
  resolution_error,
  internal,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::not_a_poset: return "NotAPoset";
    case Errc::not_a_lattice: return "NotALattice";
    case Errc::too_large: return "TooLarge";
    case Errc::too_many_worlds: return "TooManyWorlds";
    case Errc::duplicate_label: return "DuplicateLabel";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::empty_carrier: return "EmptyCarrier";
    case Errc::foreign_element: return "ForeignElement";
    case Errc::not_distributive: return "NotDistributive";
    case Errc::not_boolean: return "NotBoolean";
    case Errc::missing_generator: return "MissingGenerator";
    case Errc::not_a_generator: return "NotAGenerator";
    case Errc::duplicate_generator: return "DuplicateGenerator";
    case Errc::not_join_preserving: return "NotJoinPreserving";
    case Errc::not_meet_preserving: return "NotMeetPreserving";
    case Errc::lattice_mismatch: return "LatticeMismatch";
    case Errc::unknown_agent: return "UnknownAgent";
    case Errc::unknown_action: return "UnknownAction";
    case Errc::empty_group: return "EmptyGroup";
    case Errc::no_agents: return "NoAgents";
    case Errc::incomplete_action_appearance: return "IncompleteActionAppearance";
    case Errc::empty_action_set: return "EmptyActionSet";
    case Errc::word_length_exceeded: return "WordLengthExceeded";
    case Errc::generator_mismatch: return "GeneratorMismatch";
    case Errc::axiom_violation: return "AxiomViolation";
    case Errc::parse_error: return "ParseError";
    case Errc::resolution_error: return "ResolutionError";
    case Errc::internal: return "InternalError";
  }
  return "Unknown";
}

/// Base of every error raised by the library. `code()` identifies the failure
/// class; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when some pair of elements lacks a join or a meet.
class NotALattice : public Error {
 public:
  NotALattice(std::string first, std::string second, bool missing_join)
      : Error(Errc::not_a_lattice, std::string(missing_join ? "no join" : "no meet") + " for pair (" +
                                       first + ", " + second + ")"),
        first_(std::move(first)),
        second_(std::move(second)),
        missing_join_(missing_join) {}

  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }
  bool missing_join() const noexcept { return missing_join_; }

 private:
  std::string first_;
  std::string second_;
  bool missing_join_;
};

/// Position inside a scenario source; 1-based.
struct SourceLoc {
  std::size_t line = 0;
  std::size_t column = 0;

  // Locations are diagnostics only and never take part in document equality.
  friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

class ParseError : public Error {
 public:
  ParseError(SourceLoc loc, const std::string& message, std::string expected = {})
      : Error(Errc::parse_error, format(loc, message, expected)),
        loc_(loc),
        detail_(message),
        expected_(std::move(expected)) {}

  SourceLoc location() const noexcept { return loc_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  static std::string format(SourceLoc loc, const std::string& message, const std::string& expected) {
    std::string out = std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + message;
    if (!expected.empty()) out += " (expected " + expected + ")";
    return out;
  }

  SourceLoc loc_;
  std::string detail_;
  std::string expected_;
};

/// A reference to a name that was never declared.
class ResolutionError : public Error {
 public:
  ResolutionError(SourceLoc loc, std::string name, const std::string& what)
      : Error(Errc::resolution_error,
              std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": undeclared " + what + " '" +
                  name + "'"),
        loc_(loc),
        name_(std::move(name)) {}

  SourceLoc location() const noexcept { return loc_; }
  const std::string& name() const noexcept { return name_; }

 private:
  SourceLoc loc_;
  std::string name_;
};

}  // namespace adjoint
