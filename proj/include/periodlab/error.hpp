#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace periodlab {

enum class ErrorKind {
  parse,
  unsupported_order,
  not_mum,
  out_of_disc,
  precision,
  clearance,
  step_size,
  singular_step,
  division,
  non_involution,
  inconsistency,
  sign,
  gap,
  convergence,
  not_prime,
  crosscheck,
  insufficient_data,
  offline,
  rejected_payload,
  not_found,
  usage,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::unsupported_order: return "unsupported-order";
    case ErrorKind::not_mum: return "not-mum";
    case ErrorKind::out_of_disc: return "out-of-disc";
    case ErrorKind::precision: return "precision";
    case ErrorKind::clearance: return "clearance";
    case ErrorKind::step_size: return "step-size";
    case ErrorKind::singular_step: return "singular-step";
    case ErrorKind::division: return "division";
    case ErrorKind::non_involution: return "non-involution";
    case ErrorKind::inconsistency: return "inconsistency";
    case ErrorKind::sign: return "sign";
    case ErrorKind::gap: return "gap";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::not_prime: return "not-prime";
    case ErrorKind::crosscheck: return "crosscheck";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::offline: return "offline";
    case ErrorKind::rejected_payload: return "rejected-payload";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Every failure raised by the library. `kind()` lets callers (and the CLI's
/// exit-code mapping) dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace periodlab
