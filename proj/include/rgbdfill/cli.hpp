// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rgbdfill::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the rgbdfill tool. `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors and 1 on operational failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace rgbdfill::cli
