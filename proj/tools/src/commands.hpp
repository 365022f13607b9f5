// Copyright 2026 The ksmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef KSMOOTH_TOOLS_COMMANDS_HPP_
#define KSMOOTH_TOOLS_COMMANDS_HPP_

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace ksmooth::cli {

struct RunResult {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;  // also stored under "result" in metadata.json
};

RunResult run_smooth(const RunConfig& cfg, const std::filesystem::path& out);
RunResult run_table(const RunConfig& cfg, const std::filesystem::path& out);
RunResult run_cv(const RunConfig& cfg, const std::filesystem::path& out);
RunResult run_bench(const RunConfig& cfg, const std::filesystem::path& out);

// Dispatches on cfg.command; the output directory is cfg.output_dir or the
// environment default.
RunResult run(const RunConfig& cfg);

}  // namespace ksmooth::cli

#endif  // KSMOOTH_TOOLS_COMMANDS_HPP_
