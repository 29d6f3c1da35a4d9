#pragma once

#include <stdexcept>
#include <string>

namespace prevision {

// Common base so callers can catch every library fault in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed numeric or document input.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A structural invariant failed (masses off, unsorted breakpoints, size mismatches).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of probability zero with no attached conditional charge.
class NullConditioningEvent : public Error {
 public:
  using Error::Error;
};

// A partition-prevision result fell outside the representable class.
class UnstructuredResult : public Error {
 public:
  using Error::Error;
};

// Barycenter of an empty interval.
class DegenerateInterval : public Error {
 public:
  using Error::Error;
};

// A countable combination whose per-state series fails to settle.
class DivergentCombination : public Error {
 public:
  using Error::Error;
};

// The dominating-rival construction needs a forecast gap and none exists.
class NotNonconglomerable : public Error {
 public:
  using Error::Error;
};

// The rule family lacks the uniform similarity property the construction needs.
class SimilarityViolated : public Error {
 public:
  using Error::Error;
};

// An operation's stated precondition does not hold for the given arguments.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

// A forecast system with no entries where at least one is required.
class EmptySystem : public Error {
 public:
  using Error::Error;
};

// The operation supports a narrower class of scoring rules than was supplied.
class UnsupportedRule : public Error {
 public:
  using Error::Error;
};

// Unknown scenario id.
class UnknownScenario : public Error {
 public:
  using Error::Error;
};

// Argument outside the operation's domain.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// An exact value would need an irrational square root; callers must stay on
// perfect-square inputs or switch to approximate evaluation.
class InexactValue : public Error {
 public:
  using Error::Error;
};

}  // namespace prevision
