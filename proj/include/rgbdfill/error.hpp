// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgbdfill {

enum class ErrorCode {
  kBehindCamera,
  kInvalidDepth,
  kInvalidIntrinsics,
  kInvalidTransform,
  kInvalidSchedule,
  kInvalidTimestep,
  kInvalidEta,
  kInvalidConfig,
  kShapeMismatch,
  kNonFiniteInput,
  kDegenerateTimestep,
  kTrainingDiverged,
  kNoObservations,
  kEmptyMask,
  kTooSmall,
  kZeroArea,
  kMalformedFile,
  kDimMismatch,
  kNonRigid,
  kMissingFile,
  kDegenerateSpec,
  kIo,
};

/// Stable kebab-case identifier, e.g. "behind-camera".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace rgbdfill
