// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psc {

enum class Errc {
  InvalidRange,
  InvalidResolution,
  InvalidOrder,
  InvalidSpec,
  InvalidModel,
  InvalidCrossing,
  NoApplicableRecords,
  InsufficientPoints,
  DegenerateAbscissae,
  OutOfDomain,
  ParseError,
  ValidationError,
  UnsupportedFormat,
  IoFailure,
  ConflictArchiveFailure,
  KeyNotFound,
  SpecMismatch,
  EmptyReport,
};

std::string_view errc_name(Errc code);

/// Exit code contract used by the CLI: 1 validation, 2 I/O, 3 insufficient data.
int errc_exit_code(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  Errc code() const { return code_; }

  /// The description without the code prefix that what() carries.
  const std::string& message() const { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace psc
