#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

// Quotient or convergent generation would exceed the configured bit budget.
class GenerationOverflow : public std::runtime_error {
 public:
  GenerationOverflow(std::size_t index, std::size_t bits, std::size_t max_bits)
      : std::runtime_error("continued fraction generation overflow: q_" +
                           std::to_string(index) + " needs " + std::to_string(bits) +
                           " bits (cap " + std::to_string(max_bits) + ")"),
        index(index), bits(bits), max_bits(max_bits) {}
  std::size_t index;
  std::size_t bits;
  std::size_t max_bits;
};

// A certified construction could not be completed within the search cap.
// `deepest` is the last certified stage, `obstruction` a human-readable reason
// (typically a badness bound blocking all further candidates).
class NotFoundWithinCap : public std::runtime_error {
 public:
  NotFoundWithinCap(std::size_t deepest, std::string obstruction)
      : std::runtime_error("construction obstructed after stage " +
                           std::to_string(deepest) + ": " + obstruction),
        deepest(deepest), obstruction(std::move(obstruction)) {}
  std::size_t deepest;
  std::string obstruction;
};

// No truncation point exists because the tail of the function is not summable.
class NoSuchN : public std::runtime_error {
 public:
  explicit NoSuchN(const std::string& what) : std::runtime_error(what) {}
};

// A series tail has no summable closed form.
class DivergentTail : public std::runtime_error {
 public:
  explicit DivergentTail(const std::string& what) : std::runtime_error(what) {}
};

// Malformed textual input (literals, psi specs, system files).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dioph
