// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/error.hpp"

namespace oce {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kUnreadable: return "Unreadable";
    case Errc::kZeroEligibleFiles: return "ZeroEligibleFiles";
    case Errc::kFileTooShort: return "FileTooShort";
    case Errc::kInsufficientFiles: return "InsufficientFiles";
    case Errc::kEmptyShotPool: return "EmptyShotPool";
    case Errc::kMalformedTask: return "MalformedTask";
    case Errc::kTransportError: return "TransportError";
    case Errc::kRateLimited: return "RateLimited";
    case Errc::kContextOverflow: return "ContextOverflow";
    case Errc::kMalformedRound1: return "MalformedRound1";
    case Errc::kMalformedRound2: return "MalformedRound2";
    case Errc::kAllDocumentsEmpty: return "AllDocumentsEmpty";
    case Errc::kEmptyDocument: return "EmptyDocument";
    case Errc::kPlanMismatch: return "PlanMismatch";
    case Errc::kSourceExhausted: return "SourceExhausted";
    case Errc::kEmptyOutcomes: return "EmptyOutcomes";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kParseError: return "ParseError";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace oce
