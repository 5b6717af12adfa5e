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

// Command-line driver: mtfcma <sweep|scatter|modes|validate> [--config f] [--out d] [--threads n] [--quiet]

#include <CLI11.hpp>

#include "mtfcma/run.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Sub-structure characteristic modes of microstrip antennas (global MTF)"};
    app.set_version_flag("--version", std::string(mtfcma::tool_version));
    app.require_subcommand(1);

    std::string config, out;
    int threads = -1;
    bool quiet = false;
    auto common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", config, "run configuration (TOML)");
        if (need_config)
            c->required();
        sub->add_option("--out", out, "output directory (overrides run.out)");
        sub->add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        sub->add_flag("--quiet", quiet, "only report errors");
    };
    common(app.add_subcommand("sweep", "CMA frequency sweep: ms.csv, resonances.csv, eigencurrents"), true);
    common(app.add_subcommand("scatter", "plane-wave scattering: rcs.csv"), true);
    common(app.add_subcommand("modes", "characteristic modes at one frequency"), true);
    common(app.add_subcommand("validate", "oracle suite; exit 2 when a check fails"), false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : mtfcma::exit_error;
    }

    mtfcma::RunOptions opt;
    if (!config.empty())
        opt.config = config;
    if (!out.empty())
        opt.out = out;
    opt.threads = threads;
    opt.quiet = quiet;
    return mtfcma::run_command(app.get_subcommands().front()->get_name(), opt);
}
