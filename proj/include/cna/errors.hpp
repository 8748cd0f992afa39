#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cna {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value is outside the documented bounds.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// The orthogonality constraints do not pin down a single direction.
class DegenerateConstraintError : public Error {
 public:
  DegenerateConstraintError(int rank, int dim)
      : Error("degenerate constraint system: numeric rank " + std::to_string(rank) +
              " in dimension " + std::to_string(dim)),
        rank_(rank),
        dim_(dim) {}

  int rank() const noexcept { return rank_; }
  int dim() const noexcept { return dim_; }

 private:
  int rank_;
  int dim_;
};

class ParityError : public Error {
 public:
  using Error::Error;
};

/// Raised while walking the measurement ladder. Positions and outcomes are 1-based.
class LadderDegeneracyError : public Error {
 public:
  LadderDegeneracyError(int chain_position, int outcome, int rank)
      : Error("ladder degeneracy while deriving M_" + std::to_string(chain_position) +
              " at outcome " + std::to_string(outcome) + " (constraint rank " +
              std::to_string(rank) + ")"),
        chain_position_(chain_position),
        outcome_(outcome) {}

  int chain_position() const noexcept { return chain_position_; }
  int outcome() const noexcept { return outcome_; }

 private:
  int chain_position_;
  int outcome_;
};

class IncompleteDataError : public Error {
 public:
  using Error::Error;
};

class InvalidAssignmentError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  CapacityError(std::uint64_t requested, std::uint64_t cap)
      : Error("enumeration needs more than " + std::to_string(cap) + " assignments" +
              (requested ? " (" + std::to_string(requested) + ")" : std::string{})) {}
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleConcentrationError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace cna
