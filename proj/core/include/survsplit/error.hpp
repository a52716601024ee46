#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace survsplit {

enum class ErrorCode {
  NoEvents,
  NonFinite,
  DegenerateCovariate,
  ZeroScale,
  NoAdmissibleCut,
  InvalidN,
  EmptyGroup,
  InvalidArgument,
  Parse,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the harness, the CLI) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace survsplit
