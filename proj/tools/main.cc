// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include <iostream>

#include "cli.h"

int main(int argc, char** argv) {
  return medsel::tools::RunCli(argc, argv, std::cout, std::cerr);
}
