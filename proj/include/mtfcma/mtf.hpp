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
#include <memory>

#include <Eigen/LU>

#include "mtfcma/operators.hpp"

namespace mtfcma
{

/// Exterior (vacuum by default) and interior (substrate) media.
struct Media
{
    Medium exterior{};
    Medium interior{4.7, 1.0};
};

/// Mesh plus everything derived from it once: basis, coincidence, and the
/// assembler with its frequency-independent cache.
class Structure
{
  public:
    explicit Structure(TaggedMesh mesh, AssemblyOptions options = {}, double coincidence_tol = 1e-9);

    const TaggedMesh& mesh() const { return *mesh_; }
    const RwgBasis& basis() const { return *basis_; }
    const CoincidenceMap& coincidence() const { return coincidence_; }
    const Assembler& assembler() const { return *assembler_; }

  private:
    std::unique_ptr<TaggedMesh> mesh_;
    std::unique_ptr<RwgBasis> basis_;
    CoincidenceMap coincidence_;
    std::unique_ptr<Assembler> assembler_;
};

/// Dense system in unknown order [Jd | Md | Jg | Jr]. The accessible
/// partition is I1 = [Jd Md Jg], I2 = Jr.
struct BlockedSystem
{
    double frequency = 0.0;
    Media media;
    CMatrix Z;
    std::array<Eigen::Index, 4> offset{};
    std::array<Eigen::Index, 4> size{};

    Eigen::Index n1() const { return offset[3]; }
    Eigen::Index n2() const { return size[3]; }
    Eigen::Index total() const { return n1() + n2(); }

    auto Z11() const { return Z.topLeftCorner(n1(), n1()); }
    auto Z12() const { return Z.topRightCorner(n1(), n2()); }
    auto Z21() const { return Z.bottomLeftCorner(n2(), n1()); }
    auto Z22() const { return Z.bottomRightCorner(n2(), n2()); }

    /// Diagonal of the sign flip D: -1 on the Md rows, +1 elsewhere.
    RVector sign_flip() const;

    /// Right-hand side [E_d; eta0 H_d; E_g; E_r].
    CVector rhs(const Excitation& excitation) const;
};

struct SystemOptions
{
    bool reuse_transposes = true;  // fill (b, a) blocks from (a, b)
};

BlockedSystem assemble_system(const Structure& structure, const Media& media, double freq_hz,
                              SystemOptions options = {});

struct CurrentSolution
{
    CVector Jd, Md, Jg, Jr;
    double residual = 0.0;
    double rcond = 0.0;

    static CurrentSolution from_stacked(const BlockedSystem& sys, const CVector& x);
    CVector stacked() const;
    const CVector& group(UnknownGroup g) const;
};

/// Direct dense LU of the full system. Throws SingularMatrixError when the
/// reciprocal condition estimate drops below 1e-13.
CurrentSolution solve_driven(const BlockedSystem& sys, const Excitation& excitation);

/// I1 = -Z11^{-1} Z12 I2 for a given accessible current.
CurrentSolution recover_nonaccessible(const BlockedSystem& sys, const CVector& I2);
CurrentSolution recover_nonaccessible(const BlockedSystem& sys, const Eigen::PartialPivLU<CMatrix>& z11,
                                      const CVector& I2);

} // namespace mtfcma
