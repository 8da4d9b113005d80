#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlsrep {

enum class ErrorCode {
  invalid_spec,
  invalid_dimension,
  resolution_too_small,
  invalid_field,
  no_convergence,
  invalid_regime,
  regime_not_covered,
  wrong_dimension,
  insufficient_records,
  not_radial,
  bridge_construction_failure,
  config_invalid,
  resource,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// that the CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nlsrep
