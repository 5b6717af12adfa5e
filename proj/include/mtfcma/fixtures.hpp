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

#include "mtfcma/mesh.hpp"

namespace mtfcma::fixtures
{

/// Geodesic sphere: each icosahedron face split into nu^2 triangles, vertices
/// pushed to the sphere. 20 nu^2 triangles.
TaggedMesh icosphere(double radius, int nu, SurfaceRole role = SurfaceRole::Dielectric,
                     const Vec3& centre = Vec3::Zero());

/// Icosphere whose vertex radius is chosen so the faceted surface encloses
/// the volume of the true sphere of `radius`.
TaggedMesh equal_volume_icosphere(double radius, int nu, SurfaceRole role = SurfaceRole::Dielectric,
                                  const Vec3& centre = Vec3::Zero());

/// Volume enclosed by the triangles of `role` (outward winding assumed).
double enclosed_volume(const TaggedMesh& mesh, SurfaceRole role);

/// Flat rectangle [-lx/2, lx/2] x [-ly/2, ly/2] at height z, nx x ny cells,
/// each cut into two triangles with alternating diagonals.
TaggedMesh plate(double lx, double ly, int nx, int ny, SurfaceRole role = SurfaceRole::Radiator, double z = 0.0);

/// Microstrip fixture: substrate box [-lx/2, lx/2] x [-ly/2, ly/2] x [0, h]
/// meshed with nx x ny cells on top and bottom and nz cells across the
/// thickness; the patch covers the whole top face with the same triangles,
/// an optional ground covers the whole bottom face.
struct PatchBox
{
    double lx = 0.1;
    double ly = 0.04;
    double h = 1.55e-3;
    int nx = 25;
    int ny = 10;
    int nz = 1;
    bool ground = false;
};
TaggedMesh patch_on_box(const PatchBox& spec);

/// Copy of `mesh` where every triangle tagged `from` is duplicated with role `to`.
TaggedMesh cover(const TaggedMesh& mesh, SurfaceRole from, SurfaceRole to);

} // namespace mtfcma::fixtures
