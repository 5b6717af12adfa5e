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

#include "mtfcma/mtf.hpp"

#include <cmath>
#include <sstream>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

Structure::Structure(TaggedMesh mesh, AssemblyOptions options, double coincidence_tol)
    : mesh_(std::make_unique<TaggedMesh>(std::move(mesh)))
{
    basis_ = std::make_unique<RwgBasis>(build_rwg(*mesh_));
    coincidence_ = build_coincidence(*mesh_, coincidence_tol);
    assembler_ = std::make_unique<Assembler>(*mesh_, *basis_, options);
}

RVector BlockedSystem::sign_flip() const
{
    RVector d = RVector::Ones(total());
    d.segment(offset[1], size[1]).setConstant(-1.0);
    return d;
}

CVector BlockedSystem::rhs(const Excitation& excitation) const
{
    CVector v = CVector::Zero(total());
    auto put = [&](int g, const CVector& x) {
        if (x.size() != size[static_cast<std::size_t>(g)])
            throw DimensionError("excitation vector does not match the basis");
        v.segment(offset[static_cast<std::size_t>(g)], size[static_cast<std::size_t>(g)]) = x;
    };
    put(0, excitation.tested_e(SurfaceRole::Dielectric));
    put(1, media.exterior.impedance() * excitation.tested_h(SurfaceRole::Dielectric));
    put(2, excitation.tested_e(SurfaceRole::Ground));
    put(3, excitation.tested_e(SurfaceRole::Radiator));
    return v;
}

BlockedSystem assemble_system(const Structure& structure, const Media& media, double freq_hz,
                              SystemOptions options)
{
    if (!(freq_hz > 0.0) || !std::isfinite(freq_hz))
        throw DomainError("frequency must be positive");
    media.exterior.validate();
    media.interior.validate();

    const RwgBasis& basis = structure.basis();
    const Assembler& as = structure.assembler();

    BlockedSystem sys;
    sys.frequency = freq_hz;
    sys.media = media;
    for (int g = 0; g < 4; ++g)
    {
        sys.offset[static_cast<std::size_t>(g)] = basis.offset(static_cast<UnknownGroup>(g));
        sys.size[static_cast<std::size_t>(g)] = basis.size(static_cast<UnknownGroup>(g));
    }
    if (sys.n1() + sys.n2() != basis.total())
        throw DimensionError("unknown groups do not add up to the basis size");
    sys.Z.setZero(sys.total(), sys.total());

    const double k0 = media.exterior.wavenumber(freq_hz);
    const double k1 = media.interior.wavenumber(freq_hz);
    const double eta_0 = media.exterior.impedance();
    const double eta_1 = media.interior.impedance();

    auto blk = [&sys](int r, int c) {
        return sys.Z.block(sys.offset[static_cast<std::size_t>(r)], sys.offset[static_cast<std::size_t>(c)],
                           sys.size[static_cast<std::size_t>(r)], sys.size[static_cast<std::size_t>(c)]);
    };
    constexpr int Jd = 0, Md = 1;
    const std::array<std::pair<SurfaceRole, int>, 2> conductors = {
        std::pair{SurfaceRole::Ground, 2}, std::pair{SurfaceRole::Radiator, 3}};

    try
    {
        CMatrix L, K, L1, K1;
        if (sys.size[0] > 0)
        {
            as.assemble(k0, SurfaceRole::Dielectric, SurfaceRole::Dielectric, &L, &K);
            as.assemble(k1, SurfaceRole::Dielectric, SurfaceRole::Dielectric, &L1, &K1);
            blk(Jd, Jd) = eta_0 * L + eta_1 * L1;
            blk(Jd, Md) = -eta_0 * (K + K1);
            blk(Md, Jd) = eta_0 * (K + K1);
            blk(Md, Md) = eta_0 * L + (eta_0 * eta_0 / eta_1) * L1;
        }
        L1.resize(0, 0);
        K1.resize(0, 0);

        for (const auto& [role, g] : conductors)
        {
            if (sys.size[static_cast<std::size_t>(g)] == 0 || sys.size[0] == 0)
                continue;
            const CMatrix S_dc = assemble_S(structure.mesh(), basis, SurfaceRole::Dielectric, role,
                                            structure.coincidence()).matrix;
            const CMatrix S_cd = assemble_S(structure.mesh(), basis, role, SurfaceRole::Dielectric,
                                            structure.coincidence()).matrix;
            as.assemble(k0, SurfaceRole::Dielectric, role, &L, &K);
            blk(Jd, g) = eta_0 * L;
            blk(Md, g) = eta_0 * K + (0.5 * eta_0) * S_dc;
            if (options.reuse_transposes)
            {
                blk(g, Jd) = eta_0 * L.transpose();
                blk(g, Md) = -eta_0 * K.transpose() + (0.5 * eta_0) * S_cd;
            }
            else
            {
                as.assemble(k0, role, SurfaceRole::Dielectric, &L, &K);
                blk(g, Jd) = eta_0 * L;
                blk(g, Md) = -eta_0 * K + (0.5 * eta_0) * S_cd;
            }
        }

        for (const auto& [ra, ga] : conductors)
            for (const auto& [rb, gb] : conductors)
            {
                if (sys.size[static_cast<std::size_t>(ga)] == 0 || sys.size[static_cast<std::size_t>(gb)] == 0)
                    continue;
                if (options.reuse_transposes && ga > gb)
                {
                    blk(ga, gb) = blk(gb, ga).transpose();
                    continue;
                }
                as.assemble(k0, ra, rb, &L, nullptr);
                blk(ga, gb) = eta_0 * L;
            }
    }
    catch (const AssemblyError& e)
    {
        std::ostringstream os;
        os << "at " << freq_hz << " Hz: " << e.what();
        throw AssemblyError(os.str());
    }
    return sys;
}

// ---------------------------------------------------------------------------

CurrentSolution CurrentSolution::from_stacked(const BlockedSystem& sys, const CVector& x)
{
    if (x.size() != sys.total())
        throw DimensionError("current vector length does not match the system");
    CurrentSolution s;
    s.Jd = x.segment(sys.offset[0], sys.size[0]);
    s.Md = x.segment(sys.offset[1], sys.size[1]);
    s.Jg = x.segment(sys.offset[2], sys.size[2]);
    s.Jr = x.segment(sys.offset[3], sys.size[3]);
    return s;
}

CVector CurrentSolution::stacked() const
{
    CVector x(Jd.size() + Md.size() + Jg.size() + Jr.size());
    x << Jd, Md, Jg, Jr;
    return x;
}

const CVector& CurrentSolution::group(UnknownGroup g) const
{
    switch (g)
    {
    case UnknownGroup::Jd: return Jd;
    case UnknownGroup::Md: return Md;
    case UnknownGroup::Jg: return Jg;
    case UnknownGroup::Jr: return Jr;
    }
    return Jd;
}

namespace
{

void check_factor(double rcond, double freq_hz, const char* what)
{
    if (!(rcond >= 1e-13))
    {
        std::ostringstream os;
        os << what << " is numerically singular at " << freq_hz << " Hz (rcond estimate " << rcond << ")";
        throw SingularMatrixError(os.str());
    }
}

} // namespace

CurrentSolution solve_driven(const BlockedSystem& sys, const Excitation& excitation)
{
    const CVector v = sys.rhs(excitation);
    if (sys.total() == 0)
        throw DimensionError("empty system");
    Eigen::PartialPivLU<CMatrix> lu(sys.Z);
    const double rcond = lu.rcond();
    check_factor(rcond, sys.frequency, "system matrix");
    const CVector x = lu.solve(v);
    CurrentSolution s = CurrentSolution::from_stacked(sys, x);
    s.rcond = rcond;
    const double vn = v.norm();
    s.residual = vn > 0.0 ? (sys.Z * x - v).norm() / vn : (sys.Z * x).norm();
    return s;
}

CurrentSolution recover_nonaccessible(const BlockedSystem& sys, const Eigen::PartialPivLU<CMatrix>& z11,
                                      const CVector& I2)
{
    if (I2.size() != sys.n2())
        throw DimensionError("accessible current has the wrong length");
    CVector x(sys.total());
    x.head(sys.n1()) = -z11.solve(sys.Z12() * I2);
    x.tail(sys.n2()) = I2;
    return CurrentSolution::from_stacked(sys, x);
}

CurrentSolution recover_nonaccessible(const BlockedSystem& sys, const CVector& I2)
{
    if (sys.n1() == 0)
    {
        CVector x = I2;
        return CurrentSolution::from_stacked(sys, x);
    }
    Eigen::PartialPivLU<CMatrix> lu(sys.Z11());
    const double rcond = lu.rcond();
    check_factor(rcond, sys.frequency, "Z11");
    return recover_nonaccessible(sys, lu, I2);
}

} // namespace mtfcma
