// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace rgbdfill::selftest {

inline constexpr int kCriterionCount = 10;

struct Options {
  std::filesystem::path work_dir;  ///< scratch space; a temp dir when empty
  int train_steps = 3500;          ///< optimizer steps for the trained end-to-end check
  int train_rooms = 8;
  std::ostream* log = nullptr;     ///< progress messages
};

struct Result {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::string title(int id);

/// Runs one acceptance check (1..10). Exceptions are reported as failures.
Result run(int id, const Options& options);

/// "[PASS] 3 gaussian statistics: ... (1.2 s)"
std::string format(const Result& r);

}  // namespace rgbdfill::selftest
