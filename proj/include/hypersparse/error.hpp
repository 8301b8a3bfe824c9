#pragma once

#include <stdexcept>
#include <string>

namespace hypersparse {

enum class ErrorCode {
  duplicate_vertex,
  vertex_out_of_range,
  non_positive_weight,
  edge_too_small,
  edge_too_large,
  unknown_edge,
  length_mismatch,
  invalid_parameter,
  size_class_violation,
  capacity_exceeded,
  deletion_budget_exceeded,
  oracle_capacity,
  parse_error,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::duplicate_vertex: return "duplicate-vertex";
    case ErrorCode::vertex_out_of_range: return "out-of-range-vertex";
    case ErrorCode::non_positive_weight: return "non-positive-weight";
    case ErrorCode::edge_too_small: return "edge-too-small";
    case ErrorCode::edge_too_large: return "edge-too-large";
    case ErrorCode::unknown_edge: return "unknown-edge";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::size_class_violation: return "size-class-violation";
    case ErrorCode::capacity_exceeded: return "capacity-exceeded";
    case ErrorCode::deletion_budget_exceeded: return "deletion-budget-exceeded";
    case ErrorCode::oracle_capacity: return "oracle-capacity";
    case ErrorCode::parse_error: return "parse-error";
  }
  return "unknown";
}

/// Every rejected precondition in the library surfaces as this exception.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hypersparse
