// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/error.hpp"

namespace rgbdfill {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBehindCamera: return "behind-camera";
    case ErrorCode::kInvalidDepth: return "invalid-depth";
    case ErrorCode::kInvalidIntrinsics: return "invalid-intrinsics";
    case ErrorCode::kInvalidTransform: return "invalid-transform";
    case ErrorCode::kInvalidSchedule: return "invalid-schedule";
    case ErrorCode::kInvalidTimestep: return "invalid-timestep";
    case ErrorCode::kInvalidEta: return "invalid-eta";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kNonFiniteInput: return "non-finite-input";
    case ErrorCode::kDegenerateTimestep: return "degenerate-timestep";
    case ErrorCode::kTrainingDiverged: return "training-diverged";
    case ErrorCode::kNoObservations: return "no-observations";
    case ErrorCode::kEmptyMask: return "empty-mask";
    case ErrorCode::kTooSmall: return "too-small";
    case ErrorCode::kZeroArea: return "zero-area";
    case ErrorCode::kMalformedFile: return "malformed-file";
    case ErrorCode::kDimMismatch: return "dim-mismatch";
    case ErrorCode::kNonRigid: return "non-rigid";
    case ErrorCode::kMissingFile: return "missing-file";
    case ErrorCode::kDegenerateSpec: return "degenerate-spec";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace rgbdfill
