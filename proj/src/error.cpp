// SPDX-License-Identifier: Apache-2.0
#include "psc/error.hpp"

namespace psc {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::InvalidResolution: return "InvalidResolution";
    case Errc::InvalidOrder: return "InvalidOrder";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::InvalidCrossing: return "InvalidCrossing";
    case Errc::NoApplicableRecords: return "NoApplicableRecords";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::DegenerateAbscissae: return "DegenerateAbscissae";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::IoFailure: return "IoFailure";
    case Errc::ConflictArchiveFailure: return "ConflictArchiveFailure";
    case Errc::KeyNotFound: return "KeyNotFound";
    case Errc::SpecMismatch: return "SpecMismatch";
    case Errc::EmptyReport: return "EmptyReport";
  }
  return "UnknownError";
}

int errc_exit_code(Errc code) {
  switch (code) {
    case Errc::IoFailure:
    case Errc::ConflictArchiveFailure:
      return 2;
    case Errc::NoApplicableRecords:
    case Errc::InsufficientPoints:
    case Errc::KeyNotFound:
      return 3;
    default:
      return 1;
  }
}

}  // namespace psc
