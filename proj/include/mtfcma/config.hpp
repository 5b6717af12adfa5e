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
#include <string>
#include <vector>

#include <json.hpp>

#include "mtfcma/mtf.hpp"

namespace mtfcma
{

/// Reads a small TOML subset: [section] and [a.b] headers, bare or quoted
/// (dotted) keys, strings, integers, floats, booleans and single-line flat
/// arrays. Numbers may carry a frequency unit suffix (Hz, kHz, MHz, GHz),
/// which is converted to Hz. Duplicate keys and syntax errors raise
/// ConfigError naming the line and key.
nlohmann::json parse_toml(const std::string& text, const std::string& origin = "<config>");
nlohmann::json read_toml(const std::filesystem::path& path);

/// "1.2 GHz", "25MHz", 2.4e9 -> Hz.
double parse_frequency(const nlohmann::json& value, const std::string& key);

struct ScatterSettings
{
    PlaneWave wave;
    double theta_step_deg = 1.0;
    std::vector<double> phi_deg{0.0, 90.0};
};

struct RunConfig
{
    std::filesystem::path config_path;
    std::filesystem::path mesh_path;
    TagMap tags;
    double mesh_scale = 1.0;

    Media media;

    double f_start = 0.0;
    double f_stop = 0.0;
    double f_step = 0.0;
    double f_single = 0.0;  // modes command; 0 = grid start

    int mode_count = 10;
    double rank_tol = 1e-6;
    int candidates = 0;

    AssemblyOptions assembly;
    int threads = 0;
    std::filesystem::path out_dir = "out";

    ScatterSettings scatter;

    nlohmann::json raw;  // parsed file, echoed in the manifest

    /// Strictly increasing grid start, start + step, ... <= stop (+1e-9 relative slack).
    std::vector<double> frequencies() const;

    void validate() const;
};

/// Maps a parsed document onto RunConfig. Unknown keys are rejected.
/// Relative mesh paths resolve against the config file's directory.
RunConfig load_config(const nlohmann::json& doc, const std::filesystem::path& origin = {});
RunConfig load_config(const std::filesystem::path& path);

} // namespace mtfcma
