// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#ifndef MEDSEL_TOOLS_CLI_H_
#define MEDSEL_TOOLS_CLI_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "medsel/fixedpoint.h"
#include "medsel/pimsim.h"

namespace medsel::tools {

// Entry point shared by the binary and the tests. Results go to `out`,
// diagnostics to `err`. Returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// In-situ vs streaming cost of k-medians on the first N rows of `data`, for
// each N in `sizes`. Throws RangeError if an N exceeds the row count.
std::vector<CostRow> BuildCostReport(const EncodedMatrix& data,
                                     std::span<const std::size_t> sizes,
                                     std::size_t k, std::uint64_t seed,
                                     std::size_t max_iters,
                                     const TileConfig& tiles);

}  // namespace medsel::tools

#endif  // MEDSEL_TOOLS_CLI_H_
