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

#include <doctest.h>

#include <cmath>

#include "mtfcma/errors.hpp"
#include "mtfcma/fixtures.hpp"
#include "mtfcma/mtf.hpp"
#include "mtfcma/postproc.hpp"
#include "mtfcma/reference.hpp"

using namespace mtfcma;

namespace
{

double rel(const CMatrix& a, const CMatrix& b)
{
    return (a - b).norm() / b.norm();
}

const Structure& grounded_patch()
{
    static const Structure s(fixtures::patch_on_box({0.04, 0.024, 2e-3, 6, 4, 1, true}));
    return s;
}

PlaneWave oblique()
{
    PlaneWave w;
    w.direction = Vec3(0.3, 0.2, -1.0).normalized();
    w.polarization = w.direction.cross(Vec3::UnitY()).normalized();
    return w;
}

} // namespace

TEST_CASE("system layout")
{
    const Structure& s = grounded_patch();
    const BlockedSystem sys = assemble_system(s, Media{}, 2e9);
    const RwgBasis& b = s.basis();
    CHECK(sys.total() == b.total());
    CHECK(sys.Z.rows() == b.total());
    CHECK(sys.size[0] == b.size(UnknownGroup::Jd));
    CHECK(sys.size[1] == b.size(UnknownGroup::Md));
    CHECK(sys.size[2] == b.size(UnknownGroup::Jg));
    CHECK(sys.size[3] == b.size(UnknownGroup::Jr));
    CHECK(sys.offset[1] == sys.size[0]);
    CHECK(sys.n1() == b.non_accessible_size());
    CHECK(sys.n2() == b.accessible_size());
    CHECK(sys.Z.allFinite());

    const RVector d = sys.sign_flip();
    CHECK(d.segment(sys.offset[1], sys.size[1]).cwiseEqual(-1.0).all());
    CHECK(d.head(sys.size[0]).cwiseEqual(1.0).all());
    CHECK(d.tail(sys.n2()).cwiseEqual(1.0).all());

    CHECK_THROWS_AS(assemble_system(s, Media{}, 0.0), DomainError);
}

TEST_CASE("sign similarity and symmetry of the blocks")
{
    const Structure& s = grounded_patch();
    Media media;
    SystemOptions full;
    full.reuse_transposes = false;
    const BlockedSystem sys = assemble_system(s, media, 1.8e9, full);
    const RVector D1 = sys.sign_flip().head(sys.n1());
    const CMatrix Z11 = sys.Z11();
    CHECK(rel(Z11.transpose(), D1.asDiagonal() * Z11 * D1.asDiagonal()) < 1e-8);
    const CMatrix DZ12 = D1.asDiagonal() * CMatrix(sys.Z12());
    CHECK(rel(CMatrix(sys.Z21()), DZ12.transpose()) < 1e-8);
    const CMatrix Z22 = sys.Z22();
    CHECK(rel(Z22.transpose(), Z22) < 1e-8);

    // the transpose shortcut gives the same matrix
    const BlockedSystem fast = assemble_system(s, media, 1.8e9);
    CHECK(rel(fast.Z, sys.Z) < 1e-8);
}

TEST_CASE("dielectric-only structure reduces to two unknown groups")
{
    const Structure s(fixtures::icosphere(0.05, 2));
    const BlockedSystem sys = assemble_system(s, Media{}, 1e9);
    CHECK(sys.size[2] == 0);
    CHECK(sys.size[3] == 0);
    CHECK(sys.total() == 2 * sys.size[0]);
    CHECK(sys.size[0] == static_cast<Eigen::Index>(3 * 20 * 4 / 2));
}

TEST_CASE("driven solve")
{
    const Structure& s = grounded_patch();
    const double f = 2.2e9;
    const BlockedSystem sys = assemble_system(s, Media{}, f);

    SUBCASE("zero excitation gives zero currents")
    {
        const CurrentSolution sol = solve_driven(sys, no_excitation(s.basis(), f));
        CHECK(sol.stacked().norm() == 0.0);
    }
    SUBCASE("residual and layout")
    {
        const Excitation ex = assemble_excitation(s.mesh(), s.basis(), oblique(), f);
        const CurrentSolution sol = solve_driven(sys, ex);
        CHECK(sol.residual < 1e-10);
        CHECK(sol.rcond > 1e-13);
        const CVector x = sol.stacked();
        CHECK((sys.Z * x - sys.rhs(ex)).norm() < 1e-10 * sys.rhs(ex).norm());
        CHECK(sol.Jr.size() == sys.n2());
        CHECK(sol.group(UnknownGroup::Md).size() == sys.size[1]);
        const CurrentSolution again = CurrentSolution::from_stacked(sys, x);
        CHECK(again.stacked() == x);
        CHECK_THROWS_AS(CurrentSolution::from_stacked(sys, x.head(3)), DimensionError);
    }
    SUBCASE("excitation of the wrong size")
    {
        const Structure other(fixtures::icosphere(0.05, 1));
        CHECK_THROWS_AS(sys.rhs(no_excitation(other.basis(), f)), DimensionError);
    }
}

TEST_CASE("non-accessible currents from the accessible ones")
{
    const Structure& s = grounded_patch();
    const BlockedSystem sys = assemble_system(s, Media{}, 1.6e9);
    const CVector zero = CVector::Zero(sys.n2());
    CHECK(recover_nonaccessible(sys, zero).stacked().norm() == 0.0);

    CVector a = CVector::Zero(sys.n2()), b = CVector::Zero(sys.n2());
    for (Eigen::Index i = 0; i < sys.n2(); ++i)
    {
        a(i) = Complex(std::sin(1.0 + i), std::cos(0.3 * i));
        b(i) = Complex(0.2 * i - 1.0, 0.5);
    }
    const CurrentSolution ra = recover_nonaccessible(sys, a);
    const CVector I1 = ra.stacked().head(sys.n1());
    const CVector row = sys.Z11() * I1 + sys.Z12() * a;
    CHECK(row.norm() < 1e-9 * (sys.Z12() * a).norm());
    CHECK(ra.Jr == a);

    const Complex ca(0.7, -2.0), cb(-1.5, 0.25);
    const CurrentSolution rb = recover_nonaccessible(sys, b);
    const CurrentSolution rab = recover_nonaccessible(sys, ca * a + cb * b);
    CHECK((rab.stacked() - ca * ra.stacked() - cb * rb.stacked()).norm() < 1e-10 * rab.stacked().norm());
    CHECK_THROWS_AS(recover_nonaccessible(sys, CVector::Zero(sys.n2() + 1)), DimensionError);
}

TEST_CASE("vacuum-filled dielectric is transparent")
{
    const Structure s(fixtures::equal_volume_icosphere(0.1, 2));
    const double f = c0 / (2.0 * pi * 0.1);
    PlaneWave w;
    w.direction = Vec3::UnitZ();
    const Excitation ex = assemble_excitation(s.mesh(), s.basis(), w, f);
    Media vacuum;
    vacuum.interior = {1.0, 1.0};
    Media glass;
    glass.interior = {4.0, 1.0};
    const double s_vac = scattering_cross_section(s.mesh(), s.basis(), solve_driven(assemble_system(s, vacuum, f), ex), f, 1.0);
    const double s_eps = scattering_cross_section(s.mesh(), s.basis(), solve_driven(assemble_system(s, glass, f), ex), f, 1.0);
    CHECK(s_vac < 1e-3 * s_eps);
}

TEST_CASE("dielectric sphere against the series solution")
{
    const double a = 0.1, f = c0 / (2.0 * pi * a);
    const Structure s(fixtures::equal_volume_icosphere(a, 3));
    Media media;
    media.interior = {4.0, 1.0};
    PlaneWave w;
    w.direction = Vec3::UnitZ();
    w.polarization = Vec3::UnitX();
    const CurrentSolution sol =
        solve_driven(assemble_system(s, media, f), assemble_excitation(s.mesh(), s.basis(), w, f));
    std::vector<double> th;
    for (int i = 0; i <= 180; ++i)
        th.push_back(i);
    const RMatrix sigma = rcs(far_field(s.mesh(), s.basis(), sol, f, FarFieldGrid{th, {0.0, 90.0}}), 1.0);
    const RcsCurve ref = mie_dielectric_rcs(a, 4.0, f, th);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i)
    {
        const auto r = static_cast<Eigen::Index>(i);
        num += std::pow(sigma(r, 0) - ref.sigma_e[i], 2) + std::pow(sigma(r, 1) - ref.sigma_h[i], 2);
        den += std::pow(ref.sigma_e[i], 2) + std::pow(ref.sigma_h[i], 2);
    }
    CHECK(std::sqrt(num / den) < 0.02);
}

TEST_CASE("fully covered dielectric shields its interior")
{
    const double a = 0.1, f = c0 / (2.0 * pi * a);
    const Structure s(fixtures::cover(fixtures::equal_volume_icosphere(a, 3), SurfaceRole::Dielectric,
                                      SurfaceRole::Radiator));
    Media media;
    media.interior = {4.0, 1.0};
    PlaneWave w;
    w.direction = Vec3::UnitZ();
    const CurrentSolution sol =
        solve_driven(assemble_system(s, media, f), assemble_excitation(s.mesh(), s.basis(), w, f));
    SurfaceSources inside;
    inside.electric = {{SurfaceRole::Dielectric, sol.Jd}};
    inside.magnetic = sol.Md;
    for (const Vec3& r : {Vec3(0.0, 0.0, 0.0), Vec3(0.02, -0.03, 0.01), Vec3(-0.04, 0.01, -0.03)})
    {
        const double e = radiated_field(s.mesh(), s.basis(), inside, media.interior, f, r).norm();
        CHECK(20.0 * std::log10(e) < -40.0);
    }
}
