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

// Writes the rectangular microstrip fixture (patch over a finite FR-4 slab)
// as Gmsh v2.2 plus a matching sweep config.

#include <cstdio>
#include <fstream>

#include <CLI11.hpp>

#include "mtfcma/errors.hpp"
#include "mtfcma/fixtures.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Microstrip fixture generator"};
    mtfcma::fixtures::PatchBox pb;
    std::string out = "patch.msh";
    double eps_r = 4.7;
    app.add_option("--lx", pb.lx, "substrate length (m)");
    app.add_option("--ly", pb.ly, "substrate width (m)");
    app.add_option("--height", pb.h, "substrate height (m)");
    app.add_option("--nx", pb.nx, "cells along x");
    app.add_option("--ny", pb.ny, "cells along y");
    app.add_option("--nz", pb.nz, "cells across the thickness");
    app.add_flag("--ground", pb.ground, "add a ground plane on the bottom face");
    app.add_option("--eps", eps_r, "relative permittivity written to the config");
    app.add_option("-o,--out", out, "output .msh path");
    CLI11_PARSE(app, argc, argv);

    try
    {
        const auto mesh = mtfcma::fixtures::patch_on_box(pb);
        const std::filesystem::path msh = out;
        mtfcma::write_gmsh(mesh, msh, {{mtfcma::SurfaceRole::Radiator, "patch"},
                                       {mtfcma::SurfaceRole::Ground, "ground"},
                                       {mtfcma::SurfaceRole::Dielectric, "substrate"}});
        std::filesystem::path cfg = msh;
        cfg.replace_extension(".toml");
        std::ofstream c(cfg);
        c << "# generated by mtfcma_meshgen\n"
          << "[mesh]\npath = \"" << msh.filename().string() << "\"\n\n"
          << "[mesh.tags]\npatch = \"radiator\"\nsubstrate = \"dielectric\"\n"
          << (pb.ground ? "ground = \"ground\"\n" : "") << "\n"
          << "[media]\neps_r = " << eps_r << "\n\n"
          << "[frequency]\nstart = \"1.0 GHz\"\nstop = \"3.0 GHz\"\nstep = \"25 MHz\"\nsingle = \"1.275 GHz\"\n\n"
          << "[cma]\nmodes = 10\nrank_tol = 1e-6\n\n"
          << "[run]\nout = \"out\"\n";
        if (!c)
            throw mtfcma::IoError("cannot write " + cfg.string());
        std::printf("%s: %zu triangles, average edge %.3f mm\n%s\n", msh.string().c_str(), mesh.triangles().size(),
                    1e3 * mesh.average_edge_length(), cfg.string().c_str());
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
