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

#include "mtfcma/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

std::string_view to_string(SurfaceRole role)
{
    switch (role)
    {
    case SurfaceRole::Radiator: return "Radiator";
    case SurfaceRole::Ground: return "Ground";
    case SurfaceRole::Dielectric: return "Dielectric";
    }
    return "?";
}

SurfaceRole parse_surface_role(std::string_view name)
{
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "radiator" || s == "patch")
        return SurfaceRole::Radiator;
    if (s == "ground" || s == "gnd")
        return SurfaceRole::Ground;
    if (s == "dielectric" || s == "substrate")
        return SurfaceRole::Dielectric;
    throw TagError("unknown surface role '" + std::string(name) + "'");
}

namespace
{

using EdgeKey = std::uint64_t;

EdgeKey edge_key(int a, int b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<EdgeKey>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

std::pair<int, int> edge_of(EdgeKey k)
{
    return {static_cast<int>(k >> 32), static_cast<int>(k & 0xffffffffu)};
}

// +1 if the triangle visits a then b in its cyclic order, -1 if b then a.
int traversal(const std::array<int, 3>& v, int a, int b)
{
    for (int i = 0; i < 3; ++i)
    {
        if (v[i] == a && v[(i + 1) % 3] == b)
            return 1;
        if (v[i] == b && v[(i + 1) % 3] == a)
            return -1;
    }
    return 0;
}

struct CellHash
{
    std::size_t operator()(const std::array<std::int64_t, 3>& c) const
    {
        std::size_t h = static_cast<std::size_t>(c[0]) * 73856093u;
        h ^= static_cast<std::size_t>(c[1]) * 19349663u;
        h ^= static_cast<std::size_t>(c[2]) * 83492791u;
        return h;
    }
};

// Merge vertices closer than tol. Returns the old->new index map.
std::vector<int> dedup(const std::vector<Vec3>& in, double tol, std::vector<Vec3>& out)
{
    const double cell = std::max(tol, 1e-300) * 2.0;
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<int>, CellHash> grid;
    std::vector<int> map(in.size(), -1);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i)
    {
        const Vec3& p = in[i];
        std::array<std::int64_t, 3> c{static_cast<std::int64_t>(std::floor(p.x() / cell)),
                                      static_cast<std::int64_t>(std::floor(p.y() / cell)),
                                      static_cast<std::int64_t>(std::floor(p.z() / cell))};
        int found = -1;
        for (int dx = -1; dx <= 1 && found < 0; ++dx)
            for (int dy = -1; dy <= 1 && found < 0; ++dy)
                for (int dz = -1; dz <= 1 && found < 0; ++dz)
                {
                    auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
                    if (it == grid.end())
                        continue;
                    for (int j : it->second)
                        if ((out[static_cast<std::size_t>(j)] - p).norm() <= tol)
                        {
                            found = j;
                            break;
                        }
                }
        if (found < 0)
        {
            found = static_cast<int>(out.size());
            out.push_back(p);
            grid[c].push_back(found);
        }
        map[i] = found;
    }
    return map;
}

std::string edge_list(const std::vector<EdgeKey>& edges, std::size_t limit = 12)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < edges.size() && i < limit; ++i)
    {
        auto [a, b] = edge_of(edges[i]);
        os << (i ? ", " : "") << "(" << a << "," << b << ")";
    }
    if (edges.size() > limit)
        os << ", ...";
    return os.str();
}

} // namespace

TaggedMesh TaggedMesh::build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles,
                             std::vector<SurfaceRole> roles, double dedup_tol)
{
    if (triangles.size() != roles.size())
        throw TopologyError("triangle and role counts differ");

    TaggedMesh mesh;
    const std::vector<int> remap = dedup(vertices, dedup_tol, mesh.vertices_);

    mesh.triangles_.reserve(triangles.size());
    for (std::size_t t = 0; t < triangles.size(); ++t)
    {
        Triangle tri;
        for (int i = 0; i < 3; ++i)
        {
            const int old = triangles[t][static_cast<std::size_t>(i)];
            if (old < 0 || static_cast<std::size_t>(old) >= remap.size())
                throw TopologyError("triangle " + std::to_string(t) + " references missing vertex " +
                                    std::to_string(old));
            tri.v[static_cast<std::size_t>(i)] = remap[static_cast<std::size_t>(old)];
        }
        if (tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[0] == tri.v[2])
            throw TopologyError("triangle " + std::to_string(t) + " collapses after vertex merge");
        tri.role = roles[t];
        mesh.triangles_.push_back(tri);
    }

    auto update_geometry = [&mesh](Triangle& tri) {
        const Vec3& a = mesh.vertex(tri.v[0]);
        const Vec3 n = (mesh.vertex(tri.v[1]) - a).cross(mesh.vertex(tri.v[2]) - a);
        tri.area = 0.5 * n.norm();
        tri.normal = tri.area > 0.0 ? Vec3(n.normalized()) : Vec3::Zero();
    };
    for (std::size_t t = 0; t < mesh.triangles_.size(); ++t)
    {
        update_geometry(mesh.triangles_[t]);
        if (!(mesh.triangles_[t].area > min_area))
            throw TopologyError("triangle " + std::to_string(t) + " has area " +
                                std::to_string(mesh.triangles_[t].area) + " m^2");
    }

    for (SurfaceRole role : {SurfaceRole::Dielectric, SurfaceRole::Ground, SurfaceRole::Radiator})
    {
        std::unordered_map<EdgeKey, std::vector<int>> edges;
        for (std::size_t t = 0; t < mesh.triangles_.size(); ++t)
        {
            const auto& v = mesh.triangles_[t].v;
            if (mesh.triangles_[t].role != role)
                continue;
            for (int i = 0; i < 3; ++i)
                edges[edge_key(v[i], v[(i + 1) % 3])].push_back(static_cast<int>(t));
        }
        if (edges.empty())
            continue;

        std::vector<EdgeKey> open, nonmanifold;
        for (const auto& [k, ts] : edges)
        {
            if (ts.size() == 1)
                open.push_back(k);
            else if (ts.size() > 2)
                nonmanifold.push_back(k);
        }
        std::sort(open.begin(), open.end());
        std::sort(nonmanifold.begin(), nonmanifold.end());
        if (!nonmanifold.empty())
            throw TopologyError(std::string(to_string(role)) + " surface has " +
                                std::to_string(nonmanifold.size()) +
                                " edge(s) shared by more than two triangles: " + edge_list(nonmanifold));
        if (role == SurfaceRole::Dielectric && !open.empty())
            throw TopologyError("dielectric surface is not closed; " + std::to_string(open.size()) +
                                " boundary edge(s): " + edge_list(open));

        // Breadth-first propagation of a consistent winding through each piece.
        std::vector<int> component(mesh.triangles_.size(), -1);
        int ncomp = 0;
        for (std::size_t seed = 0; seed < mesh.triangles_.size(); ++seed)
        {
            if (mesh.triangles_[seed].role != role || component[seed] >= 0)
                continue;
            std::vector<int> members;
            std::deque<int> queue{static_cast<int>(seed)};
            component[seed] = ncomp;
            while (!queue.empty())
            {
                const int t = queue.front();
                queue.pop_front();
                members.push_back(t);
                const auto v = mesh.triangles_[static_cast<std::size_t>(t)].v;
                for (int i = 0; i < 3; ++i)
                {
                    const int a = v[i], b = v[(i + 1) % 3];
                    for (int u : edges[edge_key(a, b)])
                    {
                        if (u == t)
                            continue;
                        auto& tu = mesh.triangles_[static_cast<std::size_t>(u)];
                        const bool consistent = traversal(tu.v, a, b) == -1;
                        if (component[static_cast<std::size_t>(u)] < 0)
                        {
                            if (!consistent)
                                std::swap(tu.v[1], tu.v[2]);
                            component[static_cast<std::size_t>(u)] = ncomp;
                            queue.push_back(u);
                        }
                        else if (!consistent)
                        {
                            throw TopologyError(std::string(to_string(role)) +
                                                " surface is not orientable near triangles " +
                                                std::to_string(t) + " and " + std::to_string(u));
                        }
                    }
                }
            }

            if (role == SurfaceRole::Dielectric)
            {
                Vec3 origin = Vec3::Zero();
                for (int t : members)
                    origin += mesh.centroid(t);
                origin /= static_cast<double>(members.size());
                double volume = 0.0;
                for (int t : members)
                {
                    const auto& v = mesh.triangles_[static_cast<std::size_t>(t)].v;
                    volume += (mesh.vertex(v[0]) - origin)
                                  .dot((mesh.vertex(v[1]) - origin).cross(mesh.vertex(v[2]) - origin));
                }
                if (volume < 0.0)
                    for (int t : members)
                        std::swap(mesh.triangles_[static_cast<std::size_t>(t)].v[1],
                                  mesh.triangles_[static_cast<std::size_t>(t)].v[2]);
            }
            ++ncomp;
        }
        if (role == SurfaceRole::Dielectric)
            mesh.dielectric_components_ = ncomp;
    }

    for (auto& tri : mesh.triangles_)
        update_geometry(tri);
    return mesh;
}

std::vector<int> TaggedMesh::triangles_with(SurfaceRole role) const
{
    std::vector<int> out;
    for (std::size_t t = 0; t < triangles_.size(); ++t)
        if (triangles_[t].role == role)
            out.push_back(static_cast<int>(t));
    return out;
}

std::size_t TaggedMesh::count(SurfaceRole role) const
{
    return static_cast<std::size_t>(std::count_if(triangles_.begin(), triangles_.end(),
                                                  [role](const Triangle& t) { return t.role == role; }));
}

Vec3 TaggedMesh::centroid(int t) const
{
    const auto& v = triangle(t).v;
    return (vertex(v[0]) + vertex(v[1]) + vertex(v[2])) / 3.0;
}

double TaggedMesh::diameter(int t) const
{
    const auto& v = triangle(t).v;
    return std::max({(vertex(v[0]) - vertex(v[1])).norm(), (vertex(v[1]) - vertex(v[2])).norm(),
                     (vertex(v[2]) - vertex(v[0])).norm()});
}

double TaggedMesh::average_edge_length() const
{
    std::unordered_map<EdgeKey, double> edges;
    for (const auto& tri : triangles_)
        for (int i = 0; i < 3; ++i)
        {
            const int a = tri.v[i], b = tri.v[(i + 1) % 3];
            // the same geometric edge on two roles counts once per role
            const EdgeKey k = edge_key(a, b) ^ (static_cast<EdgeKey>(tri.role) << 62);
            edges.emplace(k, (vertex(a) - vertex(b)).norm());
        }
    if (edges.empty())
        return 0.0;
    double sum = 0.0;
    for (const auto& [k, len] : edges)
        sum += len;
    return sum / static_cast<double>(edges.size());
}

} // namespace mtfcma
