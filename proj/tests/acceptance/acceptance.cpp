// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. With no arguments every criterion runs and prints one
// PASS/FAIL line; --criterion N runs one. Exit status 1 when any check fails.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rgbdfill/selftest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rgbdfill acceptance checks", "acceptance"};
  std::vector<int> ids;
  std::string work;
  int train_steps = rgbdfill::selftest::Options{}.train_steps;
  bool verbose = false;
  app.add_option("--criterion", ids, "Criterion id (repeatable)")->check(CLI::Range(1, 10));
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--train-steps", train_steps, "Training steps for criterion 8")->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "Print progress");
  CLI11_PARSE(app, argc, argv);

  if (ids.empty())
    for (int i = 1; i <= rgbdfill::selftest::kCriterionCount; ++i) ids.push_back(i);

  rgbdfill::selftest::Options opt;
  opt.work_dir = work;
  opt.train_steps = train_steps;
  opt.log = verbose ? &std::cerr : nullptr;
  int failed = 0;
  for (int id : ids) {
    const auto r = rgbdfill::selftest::run(id, opt);
    std::cout << rgbdfill::selftest::format(r) << std::endl;
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
