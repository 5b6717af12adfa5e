// SPDX-License-Identifier: Apache-2.0
//
// mtfcma - sub-structure characteristic modes of microstrip antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mtfcma/config.hpp"

namespace mtfcma
{

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int
{
    exit_ok = 0,
    exit_error = 1,
    exit_validation_failed = 2
};

struct RunOptions
{
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> out;
    int threads = -1;  // -1 keeps the config value
    bool quiet = false;
};

/// Sets the spdlog level from MTFCMA_LOG (error, warn, info, debug) unless quiet.
void configure_logging(bool quiet);

/// Applies the thread count to OpenMP and Eigen (0 = all cores).
void apply_threads(int threads);

/// One oracle comparison of the validate command.
struct CheckResult
{
    std::string name;
    bool pass = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

/// Built-in sphere and patch fixtures against the analytic oracles.
std::vector<CheckResult> validation_suite(const AssemblyOptions& assembly = {});

/// Runs one of sweep, scatter, modes, validate and returns the exit code.
/// Errors are logged, never thrown.
int run_command(const std::string& command, const RunOptions& options);

void run_sweep(const RunConfig& config, const std::filesystem::path& out);
void run_scatter(const RunConfig& config, const std::filesystem::path& out);
void run_modes(const RunConfig& config, const std::filesystem::path& out);

} // namespace mtfcma
