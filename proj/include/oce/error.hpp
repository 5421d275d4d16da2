// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oce {

enum class Errc {
  kInvalidArgument,
  kUnreadable,
  kZeroEligibleFiles,
  kFileTooShort,
  kInsufficientFiles,
  kEmptyShotPool,
  kMalformedTask,
  kTransportError,
  kRateLimited,
  kContextOverflow,
  kMalformedRound1,
  kMalformedRound2,
  kAllDocumentsEmpty,
  kEmptyDocument,
  kPlanMismatch,
  kSourceExhausted,
  kEmptyOutcomes,
  kConfigError,
  kParseError,
  kIoError,
};

std::string_view to_string(Errc code);

/// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace oce
