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

#include "mtfcma/fixtures.hpp"

#include <cmath>

#include "mtfcma/errors.hpp"

namespace mtfcma::fixtures
{

namespace
{

struct Soup
{
    std::vector<Vec3> v;
    std::vector<std::array<int, 3>> t;
    std::vector<SurfaceRole> r;

    int add(const Vec3& p)
    {
        v.push_back(p);
        return static_cast<int>(v.size()) - 1;
    }

    // quad a-b-c-d (counter-clockwise seen from the outside), two triangles
    void quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, bool flip_diagonal, SurfaceRole role)
    {
        const int ia = add(a), ib = add(b), ic = add(c), id = add(d);
        if (flip_diagonal)
        {
            t.push_back({ia, ib, id});
            t.push_back({ib, ic, id});
        }
        else
        {
            t.push_back({ia, ib, ic});
            t.push_back({ia, ic, id});
        }
        r.push_back(role);
        r.push_back(role);
    }

    TaggedMesh build() { return TaggedMesh::build(std::move(v), std::move(t), std::move(r)); }
};

// Rectangular grid on a parametrised face p(s, t), s, t in [0, 1].
template <class F>
void face(Soup& soup, int ns, int nt, F p, SurfaceRole role)
{
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
        {
            const double s0 = double(i) / ns, s1 = double(i + 1) / ns;
            const double t0 = double(j) / nt, t1 = double(j + 1) / nt;
            soup.quad(p(s0, t0), p(s1, t0), p(s1, t1), p(s0, t1), (i + j) % 2 == 1, role);
        }
}

} // namespace

TaggedMesh icosphere(double radius, int nu, SurfaceRole role, const Vec3& centre)
{
    if (nu < 1 || !(radius > 0.0))
        throw DomainError("icosphere needs nu >= 1 and a positive radius");
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const std::array<Vec3, 12> ico = {Vec3(-1, phi, 0), Vec3(1, phi, 0),   Vec3(-1, -phi, 0), Vec3(1, -phi, 0),
                                      Vec3(0, -1, phi), Vec3(0, 1, phi),   Vec3(0, -1, -phi), Vec3(0, 1, -phi),
                                      Vec3(phi, 0, -1), Vec3(phi, 0, 1),   Vec3(-phi, 0, -1), Vec3(-phi, 0, 1)};
    const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                              {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                              {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    Soup soup;
    auto project = [&](const Vec3& p) { return Vec3(centre + radius * p.normalized()); };
    for (const auto& f : faces)
    {
        const Vec3 &a = ico[static_cast<std::size_t>(f[0])], &b = ico[static_cast<std::size_t>(f[1])],
                   &c = ico[static_cast<std::size_t>(f[2])];
        auto point = [&](int i, int j) {  // i along a->b, j along a->c
            return project(a + (b - a) * (double(i) / nu) + (c - a) * (double(j) / nu));
        };
        for (int i = 0; i < nu; ++i)
            for (int j = 0; i + j < nu; ++j)
            {
                soup.t.push_back({soup.add(point(i, j)), soup.add(point(i + 1, j)), soup.add(point(i, j + 1))});
                soup.r.push_back(role);
                if (i + j + 1 < nu)
                {
                    soup.t.push_back(
                        {soup.add(point(i + 1, j)), soup.add(point(i + 1, j + 1)), soup.add(point(i, j + 1))});
                    soup.r.push_back(role);
                }
            }
    }
    return soup.build();
}

double enclosed_volume(const TaggedMesh& mesh, SurfaceRole role)
{
    double v = 0.0;
    for (int t : mesh.triangles_with(role))
        v += mesh.corner(t, 0).dot(mesh.corner(t, 1).cross(mesh.corner(t, 2)));
    return v / 6.0;
}

TaggedMesh equal_volume_icosphere(double radius, int nu, SurfaceRole role, const Vec3& centre)
{
    const TaggedMesh unit = icosphere(1.0, nu, role);
    const double scale = std::cbrt(4.0 * pi / 3.0 / enclosed_volume(unit, role));
    return icosphere(radius * scale, nu, role, centre);
}

TaggedMesh plate(double lx, double ly, int nx, int ny, SurfaceRole role, double z)
{
    Soup soup;
    face(soup, nx, ny, [&](double s, double t) { return Vec3((s - 0.5) * lx, (t - 0.5) * ly, z); }, role);
    return soup.build();
}

TaggedMesh patch_on_box(const PatchBox& spec)
{
    const double x0 = -0.5 * spec.lx, y0 = -0.5 * spec.ly;
    Soup soup;
    auto at = [&](double x, double y, double z) { return Vec3(x0 + x * spec.lx, y0 + y * spec.ly, z * spec.h); };
    // top (z = h) and bottom (z = 0); winding is fixed later by the orientation pass
    face(soup, spec.nx, spec.ny, [&](double s, double t) { return at(s, t, 1.0); }, SurfaceRole::Dielectric);
    face(soup, spec.nx, spec.ny, [&](double s, double t) { return at(s, t, 0.0); }, SurfaceRole::Dielectric);
    face(soup, spec.nx, spec.nz, [&](double s, double t) { return at(s, 0.0, t); }, SurfaceRole::Dielectric);
    face(soup, spec.nx, spec.nz, [&](double s, double t) { return at(s, 1.0, t); }, SurfaceRole::Dielectric);
    face(soup, spec.ny, spec.nz, [&](double s, double t) { return at(0.0, s, t); }, SurfaceRole::Dielectric);
    face(soup, spec.ny, spec.nz, [&](double s, double t) { return at(1.0, s, t); }, SurfaceRole::Dielectric);
    face(soup, spec.nx, spec.ny, [&](double s, double t) { return at(s, t, 1.0); }, SurfaceRole::Radiator);
    if (spec.ground)
        face(soup, spec.nx, spec.ny, [&](double s, double t) { return at(s, t, 0.0); }, SurfaceRole::Ground);
    return soup.build();
}

TaggedMesh cover(const TaggedMesh& mesh, SurfaceRole from, SurfaceRole to)
{
    std::vector<Vec3> v = mesh.vertices();
    std::vector<std::array<int, 3>> t;
    std::vector<SurfaceRole> r;
    for (const auto& tri : mesh.triangles())
    {
        t.push_back(tri.v);
        r.push_back(tri.role);
    }
    for (const auto& tri : mesh.triangles())
        if (tri.role == from)
        {
            t.push_back(tri.v);
            r.push_back(to);
        }
    return TaggedMesh::build(std::move(v), std::move(t), std::move(r));
}

} // namespace mtfcma::fixtures
