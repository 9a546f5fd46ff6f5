// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/cli.hpp"

int main(int argc, char** argv) { return rgbdfill::cli::main(argc, argv); }
