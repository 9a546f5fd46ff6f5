// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace rgbdfill {

/// Execution policy for the data-parallel kernels. The serial path is the
/// reference; the parallel path must produce bit-identical results.
enum class Exec { kSerial, kParallel };

}  // namespace rgbdfill
