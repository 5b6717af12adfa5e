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

#include <algorithm>
#include <cmath>

#include "mtfcma/errors.hpp"
#include "mtfcma/mesh.hpp"

namespace mtfcma
{

std::string_view to_string(UnknownGroup group)
{
    switch (group)
    {
    case UnknownGroup::Jd: return "Jd";
    case UnknownGroup::Md: return "Md";
    case UnknownGroup::Jg: return "Jg";
    case UnknownGroup::Jr: return "Jr";
    }
    return "?";
}

SurfaceRole role_of(UnknownGroup group)
{
    switch (group)
    {
    case UnknownGroup::Jd:
    case UnknownGroup::Md: return SurfaceRole::Dielectric;
    case UnknownGroup::Jg: return SurfaceRole::Ground;
    case UnknownGroup::Jr: return SurfaceRole::Radiator;
    }
    return SurfaceRole::Dielectric;
}

const std::vector<RwgFunction>& RwgBasis::functions(SurfaceRole role) const
{
    static const std::vector<RwgFunction> empty;
    auto it = functions_.find(role);
    return it == functions_.end() ? empty : it->second;
}

Eigen::Index RwgBasis::size(UnknownGroup group) const
{
    return static_cast<Eigen::Index>(count(role_of(group)));
}

Eigen::Index RwgBasis::offset(UnknownGroup group) const
{
    Eigen::Index off = 0;
    for (int g = 0; g < static_cast<int>(group); ++g)
        off += size(static_cast<UnknownGroup>(g));
    return off;
}

Eigen::Index RwgBasis::total() const
{
    return offset(UnknownGroup::Jr) + size(UnknownGroup::Jr);
}

Vec3 RwgBasis::evaluate(const TaggedMesh& mesh, SurfaceRole role, int index, int t, const Vec3& r) const
{
    const RwgFunction& f = functions(role).at(static_cast<std::size_t>(index));
    if (t == f.tri_plus)
        return f.length / (2.0 * mesh.triangle(t).area) * (r - mesh.corner(t, f.local_plus));
    if (t == f.tri_minus)
        return f.length / (2.0 * mesh.triangle(t).area) * (mesh.corner(t, f.local_minus) - r);
    return Vec3::Zero();
}

RwgBasis build_rwg(const TaggedMesh& mesh)
{
    RwgBasis basis;
    basis.halves_.assign(mesh.triangles().size(), {});

    for (SurfaceRole role : {SurfaceRole::Radiator, SurfaceRole::Ground, SurfaceRole::Dielectric})
    {
        // ordered by (low vertex, high vertex) for a deterministic layout
        std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;  // -> (triangle, local free vertex)
        for (int t : mesh.triangles_with(role))
        {
            const auto& v = mesh.triangle(t).v;
            for (int i = 0; i < 3; ++i)
            {
                const int a = v[static_cast<std::size_t>((i + 1) % 3)];
                const int b = v[static_cast<std::size_t>((i + 2) % 3)];
                edges[{std::min(a, b), std::max(a, b)}].emplace_back(t, i);
            }
        }

        auto& fns = basis.functions_[role];
        for (const auto& [e, owners] : edges)
        {
            if (owners.size() == 1)
                continue;  // boundary edge
            if (owners.size() > 2)
                throw TopologyError(std::string(to_string(role)) + " edge (" + std::to_string(e.first) + "," +
                                    std::to_string(e.second) + ") is shared by " +
                                    std::to_string(owners.size()) + " triangles");
            RwgFunction f;
            f.edge = {e.first, e.second};
            f.role = role;
            f.length = (mesh.vertex(e.first) - mesh.vertex(e.second)).norm();

            // the plus triangle runs low -> high along the edge
            auto runs_up = [&](int t, int local) {
                const auto& v = mesh.triangle(t).v;
                return v[static_cast<std::size_t>((local + 1) % 3)] == e.first;
            };
            std::size_t plus = runs_up(owners[0].first, owners[0].second) ? 0 : 1;
            if (runs_up(owners[0].first, owners[0].second) == runs_up(owners[1].first, owners[1].second))
                plus = owners[0].first < owners[1].first ? 0 : 1;
            f.tri_plus = owners[plus].first;
            f.local_plus = owners[plus].second;
            f.tri_minus = owners[1 - plus].first;
            f.local_minus = owners[1 - plus].second;

            const int index = static_cast<int>(fns.size());
            basis.halves_[static_cast<std::size_t>(f.tri_plus)].push_back({index, f.local_plus, 1.0});
            basis.halves_[static_cast<std::size_t>(f.tri_minus)].push_back({index, f.local_minus, -1.0});
            fns.push_back(f);
        }
    }
    return basis;
}

// ---------------------------------------------------------------------------

int CoincidenceMap::find_pec(int t) const
{
    auto it = by_pec.find(t);
    return it == by_pec.end() ? -1 : it->second;
}

CoincidenceMap build_coincidence(const TaggedMesh& mesh, double tol)
{
    if (!(tol > 0.0))
        throw DomainError("coincidence tolerance must be positive");

    // Matching triangles have centroids within tol, so a grid of cell size
    // 2*tol with a 27-cell search finds every candidate.
    const double cell = 2.0 * tol;
    auto key = [cell](const Vec3& p) {
        return std::array<long long, 3>{static_cast<long long>(std::floor(p.x() / cell)),
                                        static_cast<long long>(std::floor(p.y() / cell)),
                                        static_cast<long long>(std::floor(p.z() / cell))};
    };
    std::map<std::array<long long, 3>, std::vector<int>> grid;
    for (int t : mesh.triangles_with(SurfaceRole::Dielectric))
        grid[key(mesh.centroid(t))].push_back(t);

    CoincidenceMap map;
    std::vector<int> pec = mesh.triangles_with(SurfaceRole::Radiator);
    const std::vector<int> gnd = mesh.triangles_with(SurfaceRole::Ground);
    pec.insert(pec.end(), gnd.begin(), gnd.end());
    std::sort(pec.begin(), pec.end());

    for (int p : pec)
    {
        const auto c = key(mesh.centroid(p));
        std::vector<CoincidentPair> hits;
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy)
                for (long long dz = -1; dz <= 1; ++dz)
                {
                    auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
                    if (it == grid.end())
                        continue;
                    for (int d : it->second)
                    {
                        CoincidentPair pair{p, d, 1, {-1, -1, -1}};
                        bool ok = true;
                        for (int i = 0; i < 3 && ok; ++i)
                        {
                            for (int j = 0; j < 3; ++j)
                                if ((mesh.corner(p, i) - mesh.corner(d, j)).norm() <= tol)
                                    pair.corner[static_cast<std::size_t>(i)] = j;
                            ok = pair.corner[static_cast<std::size_t>(i)] >= 0;
                        }
                        ok = ok && pair.corner[0] != pair.corner[1] && pair.corner[1] != pair.corner[2] &&
                             pair.corner[0] != pair.corner[2];
                        if (!ok)
                            continue;
                        pair.sign = mesh.triangle(p).normal.dot(mesh.triangle(d).normal) >= 0.0 ? 1 : -1;
                        hits.push_back(pair);
                    }
                }
        if (hits.size() > 1)
            throw AmbiguityError("conductor triangle " + std::to_string(p) + " matches " +
                                 std::to_string(hits.size()) + " dielectric triangles");
        if (hits.empty())
        {
            map.unpaired.push_back(p);
            continue;
        }
        map.by_pec[p] = static_cast<int>(map.pairs.size());
        map.pairs.push_back(hits.front());
    }
    return map;
}

} // namespace mtfcma
