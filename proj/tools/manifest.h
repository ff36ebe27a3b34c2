// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#ifndef MEDSEL_TOOLS_MANIFEST_H_
#define MEDSEL_TOOLS_MANIFEST_H_

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace medsel::tools {

// Everything needed to reproduce one CLI invocation. Two runs whose manifests
// agree on everything but `timestamp` produce byte-identical outputs.
struct RunManifest {
  std::string subcommand;
  nlohmann::json flags = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::string input_digest;  // "sha256:<hex>"
  std::string tool_version;
  std::string timestamp;     // UTC, ISO 8601

  nlohmann::json ToJson() const;
};

// SHA-256 of the file contents. Throws medsel::ParseError if unreadable.
std::string DigestFile(const std::string& path);
std::string UtcTimestamp();

}  // namespace medsel::tools

#endif  // MEDSEL_TOOLS_MANIFEST_H_
