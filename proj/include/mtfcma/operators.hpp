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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include "mtfcma/em_core.hpp"
#include "mtfcma/mesh.hpp"

namespace mtfcma
{

struct AssemblyOptions
{
    int regular_degree = 4;    // triangle rule on each side of a regular pair
    int near_degree = 8;       // outer rule when the inner integral is analytic
    int singular_order = 8;    // Gauss points per direction, vertex-adjacent pairs
    int close_order = 12;      // same for self and edge-adjacent pairs
    double near_factor = 2.0;  // near if centroid distance < factor * max diameter
    int threads = 0;           // 0 keeps the OpenMP default
};

enum class OperatorKind : std::uint32_t
{
    L = 1,
    K = 2,
    S = 3,
    System = 4
};

/// One Galerkin block: rows are test functions on `test`, columns source
/// functions on `source`. `medium` is 0 (exterior) or 1 (interior); S
/// blocks carry -1.
struct OperatorBlock
{
    CMatrix matrix;
    OperatorKind kind = OperatorKind::L;
    int medium = 0;
    SurfaceRole test = SurfaceRole::Dielectric;
    SurfaceRole source = SurfaceRole::Dielectric;
};

/// Builds L and K blocks for one mesh. Frequency-independent singular
/// parts of touching and near triangle pairs are computed once, on
/// construction, and shared by every later call.
///
///   L{p,q} =  jk <f_p, f_q G> - (j/k) <div f_p, div f_q G>
///   K{p,q} = -<f_p, grad G x f_q>        (principal value; residue excluded)
class Assembler
{
  public:
    Assembler(const TaggedMesh& mesh, const RwgBasis& basis, AssemblyOptions options = {});
    ~Assembler();
    Assembler(const Assembler&) = delete;
    Assembler& operator=(const Assembler&) = delete;

    const TaggedMesh& mesh() const { return mesh_; }
    const RwgBasis& basis() const { return basis_; }
    const AssemblyOptions& options() const { return options_; }

    /// Fills whichever of L and K is non-null at wavenumber k.
    void assemble(double k, SurfaceRole test, SurfaceRole source, CMatrix* L, CMatrix* K) const;

    std::size_t near_pair_count() const;
    std::size_t touching_pair_count() const;

  private:
    struct Cache;

    const TaggedMesh& mesh_;
    const RwgBasis& basis_;
    AssemblyOptions options_;
    std::unique_ptr<Cache> cache_;
};

OperatorBlock assemble_L(const Assembler& assembler, const Medium& medium, int m, SurfaceRole a, SurfaceRole b,
                         double freq_hz);
OperatorBlock assemble_K(const Assembler& assembler, const Medium& medium, int m, SurfaceRole a, SurfaceRole b,
                         double freq_hz);

/// S{p,q} = <f_p, f_q x n_d> on geometrically coincident triangles. Between
/// a conductor and the dielectric the pairing comes from `coincidence`; for
/// a = b it is the self overlap. n_d is the dielectric normal where one of
/// the two surfaces is dielectric, otherwise the triangle normal.
OperatorBlock assemble_S(const TaggedMesh& mesh, const RwgBasis& basis, SurfaceRole a, SurfaceRole b,
                         const CoincidenceMap& coincidence);

// ---------------------------------------------------------------------------
// Excitation
// ---------------------------------------------------------------------------

/// E(r) = amplitude * polarization * exp(-j k direction . r), in vacuum.
struct PlaneWave
{
    Vec3 direction = -Vec3::UnitZ();
    Vec3 polarization = Vec3::UnitX();
    Complex amplitude = 1.0;

    /// Throws DomainError unless direction and polarization are unit and orthogonal.
    void validate() const;

    CVec3 e_field(double k, const Vec3& r) const;
    CVec3 h_field(double k, const Vec3& r) const;
};

struct Excitation
{
    bool none = true;
    PlaneWave wave;
    double frequency = 0.0;
    std::map<SurfaceRole, CVector> e;  // <f_p, E^i>
    std::map<SurfaceRole, CVector> h;  // <f_p, H^i>

    const CVector& tested_e(SurfaceRole role) const;
    const CVector& tested_h(SurfaceRole role) const;
};

Excitation assemble_excitation(const TaggedMesh& mesh, const RwgBasis& basis, const PlaneWave& wave,
                               double freq_hz, int degree = 8);

/// Zero excitation of the right sizes.
Excitation no_excitation(const RwgBasis& basis, double freq_hz);

// ---------------------------------------------------------------------------
// Debug dumps
// ---------------------------------------------------------------------------

/// 32-byte header ("MTFBLK01", u64 rows, u64 cols, u32 kind, u32 zero) then
/// row-major little-endian complex doubles.
void dump_block(const CMatrix& matrix, OperatorKind kind, const std::filesystem::path& path);
CMatrix read_block(const std::filesystem::path& path, OperatorKind* kind = nullptr);

} // namespace mtfcma
