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
#include <filesystem>
#include <fstream>

#include "mtfcma/errors.hpp"
#include "mtfcma/fixtures.hpp"
#include "mtfcma/mtf.hpp"
#include "support/oracles.hpp"

using namespace mtfcma;

namespace
{

constexpr SurfaceRole R = SurfaceRole::Radiator;
constexpr SurfaceRole G = SurfaceRole::Ground;
constexpr SurfaceRole D = SurfaceRole::Dielectric;

double rel(const CMatrix& a, const CMatrix& b)
{
    return (a - b).norm() / b.norm();
}

const Structure& small_box()
{
    static const Structure s(fixtures::patch_on_box({0.03, 0.02, 2e-3, 5, 3, 1, true}));
    return s;
}

oracle::Tri corners(const TaggedMesh& mesh, int t)
{
    return {mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)};
}

// signed divergence of RWG function `fn` on triangle t (0 off support)
double divergence(const TaggedMesh& mesh, const RwgFunction& fn, int t)
{
    if (t == fn.tri_plus)
        return fn.length / mesh.triangle(t).area;
    if (t == fn.tri_minus)
        return -fn.length / mesh.triangle(t).area;
    return 0.0;
}

Vec3 rwg_value(const TaggedMesh& mesh, const RwgFunction& fn, int t, const Vec3& r)
{
    const double a2 = 2.0 * mesh.triangle(t).area;
    if (t == fn.tri_plus)
        return fn.length / a2 * (r - mesh.corner(t, fn.local_plus));
    return fn.length / a2 * (mesh.corner(t, fn.local_minus) - r);
}

} // namespace

TEST_CASE("L and K blocks are reciprocal")
{
    const Structure& s = small_box();
    const Media media;
    const double f = 2.5e9;
    const std::pair<SurfaceRole, SurfaceRole> pairs[] = {{D, D}, {R, D}, {G, R}, {G, D}, {R, R}};
    for (int m = 0; m < 2; ++m)
    {
        const Medium& med = m == 0 ? media.exterior : media.interior;
        for (const auto& [a, b] : pairs)
        {
            CAPTURE(m);
            CAPTURE(to_string(a));
            CAPTURE(to_string(b));
            const CMatrix lab = assemble_L(s.assembler(), med, m, a, b, f).matrix;
            const CMatrix lba = assemble_L(s.assembler(), med, m, b, a, f).matrix;
            CHECK(rel(lab, lba.transpose()) < 1e-8);
            const CMatrix kab = assemble_K(s.assembler(), med, m, a, b, f).matrix;
            const CMatrix kba = assemble_K(s.assembler(), med, m, b, a, f).matrix;
            if (kab.norm() > 0.0)
                CHECK(rel(kab, kba.transpose()) < 1e-8);
        }
    }
}

TEST_CASE("K vanishes on a single flat surface")
{
    const Structure s(fixtures::plate(0.1, 0.05, 6, 3));
    const CMatrix k = assemble_K(s.assembler(), Medium{}, 0, R, R, 1e9).matrix;
    CHECK(k.rows() > 0);
    CHECK(k.cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("S blocks")
{
    const Structure& s = small_box();
    const CMatrix sdd = assemble_S(s.mesh(), s.basis(), D, D, s.coincidence()).matrix;
    CHECK(sdd.norm() > 0.0);
    CHECK((sdd + sdd.transpose()).norm() < 1e-8 * sdd.norm());
    CHECK(sdd.diagonal().cwiseAbs().maxCoeff() < 1e-14 * sdd.cwiseAbs().maxCoeff());

    // conductor / dielectric overlaps exist only where the surfaces touch
    const CMatrix srd = assemble_S(s.mesh(), s.basis(), R, D, s.coincidence()).matrix;
    const CMatrix sdr = assemble_S(s.mesh(), s.basis(), D, R, s.coincidence()).matrix;
    CHECK(srd.norm() > 0.0);
    CHECK((srd + sdr.transpose()).norm() < 1e-8 * srd.norm());
    CHECK(assemble_S(s.mesh(), s.basis(), R, G, s.coincidence()).matrix.norm() == 0.0);
}

TEST_CASE("static limit of L against edge-integral references")
{
    const Structure s(fixtures::plate(0.04, 0.02, 2, 1));
    const TaggedMesh& mesh = s.mesh();
    const auto& fns = s.basis().functions(R);
    REQUIRE(fns.size() >= 3);
    const double k = 1e-5;
    CMatrix L;
    s.assembler().assemble(k, R, R, &L, nullptr);

    const auto tris = mesh.triangles_with(R);
    for (std::size_t p = 0; p < fns.size(); ++p)
        for (std::size_t q = p; q < fns.size(); ++q)
        {
            double dd = 0.0;
            for (int t1 : {fns[p].tri_plus, fns[p].tri_minus})
                for (int t2 : {fns[q].tri_plus, fns[q].tri_minus})
                    dd += divergence(mesh, fns[p], t1) * divergence(mesh, fns[q], t2) *
                          oracle::double_inv_r_coplanar(corners(mesh, t1), corners(mesh, t2));
            const Complex expect = -j_unit * dd / (4.0 * pi);
            CAPTURE(p);
            CAPTURE(q);
            CHECK(std::abs(k * L(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) - expect) <
                  1e-8 * std::abs(expect));
        }
}

TEST_CASE("well separated pairs match plain product quadrature")
{
    // two plates ten diameters apart
    TaggedMesh a = fixtures::plate(0.01, 0.01, 1, 1, R, 0.0);
    TaggedMesh b = fixtures::plate(0.01, 0.01, 1, 1, R, 0.14);
    std::vector<Vec3> v = a.vertices();
    std::vector<std::array<int, 3>> t;
    std::vector<SurfaceRole> roles;
    for (const auto& tri : a.triangles())
    {
        t.push_back(tri.v);
        roles.push_back(R);
    }
    const int off = static_cast<int>(v.size());
    const Eigen::Matrix3d tilt = Eigen::AngleAxisd(0.7, Vec3(1.0, 0.4, 0.0).normalized()).toRotationMatrix();
    for (const auto& p : b.vertices())
        v.push_back(tilt * p + Vec3(0.03, 0.0, 0.0));
    for (const auto& tri : b.triangles())
    {
        t.push_back({tri.v[0] + off, tri.v[1] + off, tri.v[2] + off});
        roles.push_back(R);
    }
    AssemblyOptions fine;
    fine.regular_degree = 8;
    const Structure s(TaggedMesh::build(v, t, roles), fine);
    const TaggedMesh& mesh = s.mesh();
    const auto& fns = s.basis().functions(R);
    REQUIRE(fns.size() == 2);
    const double k = 2.0 * pi / 0.1;
    CMatrix L, K;
    s.assembler().assemble(k, R, R, &L, &K);
    const Structure coarse(TaggedMesh::build(v, t, roles));
    CMatrix Lc, Kc;
    coarse.assembler().assemble(k, R, R, &Lc, &Kc);

    const QuadratureRule& rule = triangle_rule(8);
    Complex lref = 0.0, kref = 0.0;
    const RwgFunction &fp = fns[0], &fq = fns[1];
    for (int t1 : {fp.tri_plus, fp.tri_minus})
        for (int t2 : {fq.tri_plus, fq.tri_minus})
            for (std::size_t i = 0; i < rule.size(); ++i)
                for (std::size_t j = 0; j < rule.size(); ++j)
                {
                    const auto& bi = rule.points[i];
                    const auto& bj = rule.points[j];
                    const Vec3 x = bi[0] * mesh.corner(t1, 0) + bi[1] * mesh.corner(t1, 1) + bi[2] * mesh.corner(t1, 2);
                    const Vec3 y = bj[0] * mesh.corner(t2, 0) + bj[1] * mesh.corner(t2, 1) + bj[2] * mesh.corner(t2, 2);
                    const double w = rule.weights[i] * rule.weights[j] * mesh.triangle(t1).area * mesh.triangle(t2).area;
                    const double Rr = (x - y).norm();
                    const Complex g = std::exp(-j_unit * k * Rr) / (4.0 * pi * Rr);
                    const Vec3 f1 = rwg_value(mesh, fp, t1, x), f2 = rwg_value(mesh, fq, t2, y);
                    lref += w * (j_unit * k * f1.dot(f2) * g -
                                 j_unit / k * divergence(mesh, fp, t1) * divergence(mesh, fq, t2) * g);
                    // grad_x G = (x - y) (-jk R - 1) e^{-jkR} / (4 pi R^3)
                    const CVec3 gg = (x - y).cast<Complex>() * ((-j_unit * k * Rr - 1.0) * std::exp(-j_unit * k * Rr) /
                                                                (4.0 * pi * Rr * Rr * Rr));
                    // Eigen conjugates complex cross products, so expand by hand
                    const CVec3 c(gg.y() * f2.z() - gg.z() * f2.y(), gg.z() * f2.x() - gg.x() * f2.z(),
                                  gg.x() * f2.y() - gg.y() * f2.x());
                    kref -= w * (f1.cast<Complex>().transpose() * c)(0);
                }
    CHECK(std::abs(L(0, 1) - lref) < 1e-10 * std::abs(lref));
    CHECK(std::abs(K(0, 1) - kref) < 1e-10 * std::abs(kref));
    // default degree-4 rule on regular pairs
    CHECK(std::abs(Lc(0, 1) - lref) < 1e-4 * std::abs(lref));
    CHECK(std::abs(Kc(0, 1) - kref) < 1e-4 * std::abs(kref));
    CHECK(std::abs(kref) > 1e-3 * std::abs(lref));
}

TEST_CASE("distant functions behave as point sources")
{
    // second plate about 100 diameters away, tilted
    TaggedMesh a = fixtures::plate(0.01, 0.01, 1, 1);
    std::vector<Vec3> v = a.vertices();
    std::vector<std::array<int, 3>> t;
    for (const auto& tri : a.triangles())
        t.push_back(tri.v);
    const int off = static_cast<int>(v.size());
    const Eigen::Matrix3d tilt = Eigen::AngleAxisd(1.1, Vec3(0.2, 1.0, 0.3).normalized()).toRotationMatrix();
    for (const auto& p : a.vertices())
        v.push_back(tilt * p + Vec3(0.8, -0.6, 1.0));
    for (const auto& tri : a.triangles())
        t.push_back({tri.v[0] + off, tri.v[1] + off, tri.v[2] + off});
    const Structure s(TaggedMesh::build(v, t, std::vector<SurfaceRole>(t.size(), R)));
    const TaggedMesh& mesh = s.mesh();
    const auto& fns = s.basis().functions(R);
    REQUIRE(fns.size() == 2);
    const double k = pi;  // 2 m wavelength
    CMatrix L, K;
    s.assembler().assemble(k, R, R, &L, &K);

    auto centroid = [&](int tri) { return mesh.centroid(tri); };
    auto moment = [&](const RwgFunction& f) { return Vec3(f.length * (centroid(f.tri_minus) - centroid(f.tri_plus))); };
    auto g = [k](const Vec3& x, const Vec3& y) { return green(k, x, y); };
    const RwgFunction &fp = fns[0], &fq = fns[1];
    const Vec3 mp = moment(fp), mq = moment(fq);
    const Vec3 cp = 0.5 * (centroid(fp.tri_plus) + centroid(fp.tri_minus));
    const Vec3 cq = 0.5 * (centroid(fq.tri_plus) + centroid(fq.tri_minus));
    Complex charges = 0.0;
    for (int sp : {1, -1})
        for (int sq : {1, -1})
            charges += double(sp * sq) * fp.length * fq.length *
                       g(centroid(sp > 0 ? fp.tri_plus : fp.tri_minus), centroid(sq > 0 ? fq.tri_plus : fq.tri_minus));
    const Complex lref = j_unit * k * mp.dot(mq) * g(cp, cq) - j_unit / k * charges;
    const CVec3 gg = grad_green(k, cp, cq);
    const CVec3 gxm(gg.y() * mq.z() - gg.z() * mq.y(), gg.z() * mq.x() - gg.x() * mq.z(),
                    gg.x() * mq.y() - gg.y() * mq.x());
    const Complex kref = -(mp.cast<Complex>().transpose() * gxm)(0);
    CHECK(std::abs(L(0, 1) - lref) < 1e-3 * std::abs(lref));
    CHECK(std::abs(K(0, 1) - kref) < 1e-3 * std::abs(kref));
}

TEST_CASE("blocks are continuous in frequency")
{
    const Structure& s = small_box();
    const Medium m{4.7, 1.0};
    const CMatrix a = assemble_L(s.assembler(), m, 1, D, R, 2.0e9).matrix;
    const CMatrix b = assemble_L(s.assembler(), m, 1, D, R, 2.0e9 * (1.0 + 1e-7)).matrix;
    CHECK(rel(b, a) < 1e-5);
    const CMatrix ka = assemble_K(s.assembler(), m, 1, D, D, 2.0e9).matrix;
    const CMatrix kb = assemble_K(s.assembler(), m, 1, D, D, 2.0e9 * (1.0 + 1e-7)).matrix;
    CHECK(rel(kb, ka) < 1e-5);
}

TEST_CASE("invalid media are rejected")
{
    const Structure& s = small_box();
    CHECK_THROWS_AS(assemble_L(s.assembler(), Medium{-1.0, 1.0}, 1, D, D, 1e9), DomainError);
    CHECK_THROWS_AS(assemble_K(s.assembler(), Medium{1.0, 0.0}, 1, D, D, 1e9), DomainError);
}

TEST_CASE("plane-wave excitation")
{
    PlaneWave w;
    w.direction = Vec3(1.0, 1.0, -1.0).normalized();
    w.polarization = Vec3(1.0, -1.0, 0.0).normalized();
    w.amplitude = Complex(0.3, -1.2);
    w.validate();
    const double f = 3e9, k = Medium{}.wavenumber(f);

    SUBCASE("E and H are consistent")
    {
        const Vec3 r(0.01, -0.02, 0.05);
        const CVec3 e = w.e_field(k, r), h = w.h_field(k, r);
        const Vec3 kh = w.direction;
        const CVec3 kxe(kh.y() * e.z() - kh.z() * e.y(), kh.z() * e.x() - kh.x() * e.z(), kh.x() * e.y() - kh.y() * e.x());
        CHECK((h - kxe / eta0).norm() < 1e-15 * e.norm() / eta0);
        CHECK(std::abs(e.dot(h)) < 1e-15);
    }
    SUBCASE("tested fields against adaptive quadrature")
    {
        const Structure& s = small_box();
        const Excitation ex = assemble_excitation(s.mesh(), s.basis(), w, f);
        CHECK_FALSE(ex.none);
        for (SurfaceRole role : {R, G, D})
        {
            const auto& fns = s.basis().functions(role);
            for (std::size_t p = 0; p < fns.size(); p += 7)
            {
                Complex e = 0.0, h = 0.0;
                for (int t : {fns[p].tri_plus, fns[p].tri_minus})
                {
                    auto comp = [&](bool magnetic, bool imag) {
                        return oracle::integrate_triangle(
                            corners(s.mesh(), t),
                            [&](const Vec3& x) {
                                const CVec3 fld = magnetic ? w.h_field(k, x) : w.e_field(k, x);
                                const Complex v = rwg_value(s.mesh(), fns[p], t, x).cast<Complex>().dot(fld);
                                return imag ? v.imag() : v.real();
                            },
                            1e-14);
                    };
                    e += Complex(comp(false, false), comp(false, true));
                    h += Complex(comp(true, false), comp(true, true));
                }
                const auto i = static_cast<Eigen::Index>(p);
                const double scale = std::abs(w.amplitude) * fns[p].length * fns[p].length;
                CHECK(std::abs(ex.tested_e(role)(i) - e) < 1e-10 * scale);
                CHECK(std::abs(ex.tested_h(role)(i) - h) < 1e-10 * scale / eta0);
            }
        }
    }
    SUBCASE("invalid waves")
    {
        PlaneWave bad = w;
        bad.polarization = w.direction;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = w;
        bad.direction *= 2.0;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        CHECK_THROWS_AS(assemble_excitation(small_box().mesh(), small_box().basis(), bad, f), DomainError);
    }
    SUBCASE("no excitation is zero")
    {
        const Excitation z = no_excitation(small_box().basis(), f);
        CHECK(z.none);
        for (SurfaceRole role : {R, G, D})
        {
            CHECK(z.tested_e(role).size() == static_cast<Eigen::Index>(small_box().basis().count(role)));
            CHECK(z.tested_e(role).norm() == 0.0);
        }
    }
}

TEST_CASE("block dumps round trip")
{
    const auto dir = std::filesystem::temp_directory_path() / "mtfcma_test_dump";
    std::filesystem::create_directories(dir);
    const CMatrix m = assemble_L(small_box().assembler(), Medium{}, 0, R, D, 1.7e9).matrix;
    dump_block(m, OperatorKind::L, dir / "l.bin");
    CHECK(std::filesystem::file_size(dir / "l.bin") == 32 + 16 * static_cast<std::uintmax_t>(m.size()));
    OperatorKind kind = OperatorKind::S;
    const CMatrix back = read_block(dir / "l.bin", &kind);
    CHECK(kind == OperatorKind::L);
    CHECK(back == m);

    {
        std::ofstream bad(dir / "bad.bin", std::ios::binary);
        bad << "NOTABLOCK-------";
    }
    CHECK_THROWS_AS(read_block(dir / "bad.bin"), ParseError);
    std::filesystem::resize_file(dir / "l.bin", 40);
    CHECK_THROWS_AS(read_block(dir / "l.bin"), ParseError);
    CHECK_THROWS_AS(read_block(dir / "missing.bin"), IoError);
    std::filesystem::remove_all(dir);
}
