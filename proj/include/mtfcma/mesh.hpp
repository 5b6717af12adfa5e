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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mtfcma/common.hpp"

namespace mtfcma
{

/// Role of a surface in the microstrip model: the radiating patch (accessible
/// region), the ground plane, or the closed boundary of the substrate.
enum class SurfaceRole : std::uint8_t
{
    Radiator,
    Ground,
    Dielectric
};

std::string_view to_string(SurfaceRole role);
SurfaceRole parse_surface_role(std::string_view name);

struct Triangle
{
    std::array<int, 3> v{};
    SurfaceRole role = SurfaceRole::Dielectric;
    Vec3 normal = Vec3::Zero();
    double area = 0.0;
};

/// Physical-group name (or numeric tag as text) to surface role.
using TagMap = std::map<std::string, SurfaceRole>;

/// Triangulated surfaces with role tags.
///
/// Construction validates the topology: vertices are merged within the
/// dedup tolerance, every triangle must have a positive area, dielectric
/// triangles must form closed orientable manifolds (normals are turned to
/// point out of the dielectric), and conductor triangles may form open or
/// closed manifolds whose winding is made consistent per connected piece.
class TaggedMesh
{
  public:
    static constexpr double default_dedup_tol = 1e-9;
    static constexpr double min_area = 1e-14;

    TaggedMesh() = default;

    static TaggedMesh build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles,
                            std::vector<SurfaceRole> roles,
                            double dedup_tol = default_dedup_tol);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Triangle& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    const Vec3& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    const Vec3& corner(int t, int local) const { return vertex(triangle(t).v[static_cast<std::size_t>(local)]); }

    std::vector<int> triangles_with(SurfaceRole role) const;
    std::size_t count(SurfaceRole role) const;
    bool has(SurfaceRole role) const { return count(role) > 0; }

    Vec3 centroid(int t) const;
    double diameter(int t) const;

    /// Mean length over the unique edges of every surface.
    double average_edge_length() const;

    /// Number of connected closed pieces of the dielectric boundary.
    int dielectric_components() const { return dielectric_components_; }

  private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    int dielectric_components_ = 0;
};

/// Reads a Gmsh ASCII v2.2 file. Only 3-node triangles are kept; their first
/// element tag is the physical group. Coordinates are multiplied by `scale`.
TaggedMesh load_mesh(const std::filesystem::path& path, const TagMap& tag_map,
                     double scale = 1.0);

/// Writes the mesh as Gmsh ASCII v2.2 with one named physical group per role
/// present. `names` overrides the default group names.
void write_gmsh(const TaggedMesh& mesh, const std::filesystem::path& path,
                const std::map<SurfaceRole, std::string>& names = {});

// ---------------------------------------------------------------------------
// RWG basis
// ---------------------------------------------------------------------------

/// Coefficient groups in global order.
enum class UnknownGroup : std::uint8_t
{
    Jd = 0,
    Md = 1,
    Jg = 2,
    Jr = 3
};

std::string_view to_string(UnknownGroup group);
SurfaceRole role_of(UnknownGroup group);

/// f(r) = +l/(2A+) (r - p+) on the plus triangle, l/(2A-) (p- - r) on the minus one.
struct RwgFunction
{
    std::array<int, 2> edge{};  // vertex ids, ascending
    int tri_plus = -1;
    int tri_minus = -1;
    int local_plus = -1;        // index of the free vertex inside tri_plus
    int local_minus = -1;
    double length = 0.0;
    SurfaceRole role = SurfaceRole::Dielectric;
};

/// One RWG half supported on a triangle.
struct RwgHalf
{
    int function = -1;  // index within the role's function list
    int local = -1;     // free vertex (local index 0..2)
    double sign = 0.0;  // +1 on tri_plus, -1 on tri_minus
};

class RwgBasis
{
  public:
    const std::vector<RwgFunction>& functions(SurfaceRole role) const;
    std::size_t count(SurfaceRole role) const { return functions(role).size(); }

    /// Halves attached to triangle t (empty for triangles whose edges are all boundary edges).
    const std::vector<RwgHalf>& halves(int t) const { return halves_[static_cast<std::size_t>(t)]; }

    Eigen::Index offset(UnknownGroup group) const;
    Eigen::Index size(UnknownGroup group) const;
    Eigen::Index total() const;

    /// Accessible/non-accessible split: [Jd Md Jg] followed by [Jr].
    Eigen::Index non_accessible_size() const { return offset(UnknownGroup::Jr); }
    Eigen::Index accessible_size() const { return size(UnknownGroup::Jr); }

    /// Value of basis function `index` of `role` at point r inside triangle t.
    Vec3 evaluate(const TaggedMesh& mesh, SurfaceRole role, int index, int t,
                  const Vec3& r) const;

  private:
    friend RwgBasis build_rwg(const TaggedMesh& mesh);

    std::map<SurfaceRole, std::vector<RwgFunction>> functions_;
    std::vector<std::vector<RwgHalf>> halves_;
};

RwgBasis build_rwg(const TaggedMesh& mesh);

// ---------------------------------------------------------------------------
// Conductor / dielectric coincidence
// ---------------------------------------------------------------------------

struct CoincidentPair
{
    int pec = -1;
    int dielectric = -1;
    int sign = 1;                  // sign of n_pec . n_d
    std::array<int, 3> corner{};   // pec local vertex i sits on dielectric local vertex corner[i]
};

struct CoincidenceMap
{
    std::vector<CoincidentPair> pairs;
    std::vector<int> unpaired;     // conductor triangles without a dielectric partner

    /// Index into `pairs` for a conductor triangle, or -1.
    int find_pec(int t) const;

    std::map<int, int> by_pec;
};

CoincidenceMap build_coincidence(const TaggedMesh& mesh, double tol = 1e-9);

} // namespace mtfcma
