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

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mtfcma/errors.hpp"
#include "mtfcma/mesh.hpp"

namespace mtfcma
{

namespace
{

std::string unquote(std::string s)
{
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

struct LineReader
{
    std::istream& in;
    const std::string& path;
    std::size_t line_no = 0;

    bool next(std::string& line)
    {
        while (std::getline(in, line))
        {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos)
                return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
    }

    std::string require(const char* context)
    {
        std::string line;
        if (!next(line))
            fail(std::string("unexpected end of file in ") + context);
        return line;
    }
};

} // namespace

TaggedMesh load_mesh(const std::filesystem::path& path, const TagMap& tag_map, double scale)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open mesh file " + path.string());
    const std::string name = path.string();
    LineReader rd{in, name};

    std::map<int, std::string> physical_names;  // tag -> name (dimension 2 only)
    std::unordered_map<long, int> node_index;
    std::vector<Vec3> nodes;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> tri_tag;
    bool have_format = false, have_nodes = false, have_elements = false;

    std::string line;
    while (rd.next(line))
    {
        std::istringstream head(line);
        std::string section;
        head >> section;
        if (section == "$MeshFormat")
        {
            std::istringstream ss(rd.require("$MeshFormat"));
            double version = 0.0;
            int file_type = -1;
            if (!(ss >> version >> file_type))
                rd.fail("malformed $MeshFormat line");
            if (version < 2.0 || version >= 3.0)
                rd.fail("unsupported mesh format version " + std::to_string(version) + " (need 2.x)");
            if (file_type != 0)
                rd.fail("binary mesh files are not supported");
            if (rd.require("$MeshFormat") != "$EndMeshFormat")
                rd.fail("expected $EndMeshFormat");
            have_format = true;
        }
        else if (section == "$PhysicalNames")
        {
            std::istringstream ss(rd.require("$PhysicalNames"));
            long n = -1;
            if (!(ss >> n) || n < 0)
                rd.fail("malformed physical-name count");
            for (long i = 0; i < n; ++i)
            {
                std::istringstream es(rd.require("$PhysicalNames"));
                int dim = 0, tag = 0;
                if (!(es >> dim >> tag))
                    rd.fail("malformed physical name");
                std::string rest;
                std::getline(es >> std::ws, rest);
                if (dim == 2)
                    physical_names[tag] = unquote(rest);
            }
            if (rd.require("$PhysicalNames") != "$EndPhysicalNames")
                rd.fail("expected $EndPhysicalNames");
        }
        else if (section == "$Nodes")
        {
            std::istringstream ss(rd.require("$Nodes"));
            long n = -1;
            if (!(ss >> n) || n < 0)
                rd.fail("malformed node count");
            nodes.reserve(static_cast<std::size_t>(n));
            for (long i = 0; i < n; ++i)
            {
                std::istringstream ns(rd.require("$Nodes"));
                long id = 0;
                double x = 0, y = 0, z = 0;
                if (!(ns >> id >> x >> y >> z))
                    rd.fail("malformed node line");
                if (!node_index.emplace(id, static_cast<int>(nodes.size())).second)
                    rd.fail("duplicate node id " + std::to_string(id));
                nodes.emplace_back(x * scale, y * scale, z * scale);
            }
            if (rd.require("$Nodes") != "$EndNodes")
                rd.fail("expected $EndNodes");
            have_nodes = true;
        }
        else if (section == "$Elements")
        {
            std::istringstream ss(rd.require("$Elements"));
            long n = -1;
            if (!(ss >> n) || n < 0)
                rd.fail("malformed element count");
            for (long i = 0; i < n; ++i)
            {
                std::istringstream es(rd.require("$Elements"));
                long id = 0;
                int type = 0, ntags = 0;
                if (!(es >> id >> type >> ntags) || ntags < 0)
                    rd.fail("malformed element line");
                std::vector<int> tags(static_cast<std::size_t>(ntags));
                for (auto& t : tags)
                    if (!(es >> t))
                        rd.fail("malformed element tags");
                if (type != 2)
                    continue;  // points, lines, quads, volumes are ignored
                std::array<int, 3> tri{};
                for (auto& v : tri)
                {
                    long nid = 0;
                    if (!(es >> nid))
                        rd.fail("triangle with fewer than 3 nodes");
                    if (have_nodes)
                    {
                        auto it = node_index.find(nid);
                        if (it == node_index.end())
                            rd.fail("element " + std::to_string(id) + " references unknown node " +
                                    std::to_string(nid));
                        v = it->second;
                    }
                    else
                    {
                        rd.fail("$Elements before $Nodes");
                    }
                }
                if (tags.empty())
                    rd.fail("triangle " + std::to_string(id) + " has no physical tag");
                tris.push_back(tri);
                tri_tag.push_back(tags[0]);
            }
            if (rd.require("$Elements") != "$EndElements")
                rd.fail("expected $EndElements");
            have_elements = true;
        }
        else if (!section.empty() && section[0] == '$')
        {
            // skip unknown sections
            const std::string end = "$End" + section.substr(1);
            while (rd.next(line) && line != end)
            {
            }
        }
        else
        {
            rd.fail("unexpected content '" + line + "'");
        }
    }
    if (!have_format || !have_nodes || !have_elements)
        throw ParseError(name + ": missing $MeshFormat, $Nodes or $Elements section");

    std::set<int> used(tri_tag.begin(), tri_tag.end());
    for (const auto& [key, role] : tag_map)
    {
        bool known = false;
        for (const auto& [tag, pname] : physical_names)
            known = known || pname == key;
        for (int tag : used)
            known = known || std::to_string(tag) == key;
        if (!known)
            throw TagError(name + ": physical group '" + key + "' not found");
    }

    std::map<int, SurfaceRole> tag_role;
    for (int tag : used)
    {
        auto pn = physical_names.find(tag);
        auto it = pn != physical_names.end() ? tag_map.find(pn->second) : tag_map.end();
        if (it == tag_map.end())
            it = tag_map.find(std::to_string(tag));
        if (it == tag_map.end())
            throw TagError(name + ": physical group " + std::to_string(tag) +
                           (pn != physical_names.end() ? " ('" + pn->second + "')" : std::string()) +
                           " has no surface role");
        tag_role[tag] = it->second;
    }

    std::vector<SurfaceRole> roles;
    roles.reserve(tri_tag.size());
    for (int tag : tri_tag)
        roles.push_back(tag_role.at(tag));
    return TaggedMesh::build(std::move(nodes), std::move(tris), std::move(roles));
}

void write_gmsh(const TaggedMesh& mesh, const std::filesystem::path& path,
                const std::map<SurfaceRole, std::string>& names)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write mesh file " + path.string());
    out.precision(17);

    const SurfaceRole all[] = {SurfaceRole::Radiator, SurfaceRole::Ground, SurfaceRole::Dielectric};
    auto tag_of = [](SurfaceRole r) { return static_cast<int>(r) + 1; };
    auto name_of = [&names](SurfaceRole r) {
        auto it = names.find(r);
        return it != names.end() ? it->second : std::string(to_string(r));
    };

    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    int present = 0;
    for (SurfaceRole r : all)
        present += mesh.has(r) ? 1 : 0;
    out << "$PhysicalNames\n" << present << "\n";
    for (SurfaceRole r : all)
        if (mesh.has(r))
            out << "2 " << tag_of(r) << " \"" << name_of(r) << "\"\n";
    out << "$EndPhysicalNames\n";

    out << "$Nodes\n" << mesh.vertices().size() << "\n";
    for (std::size_t i = 0; i < mesh.vertices().size(); ++i)
    {
        const Vec3& p = mesh.vertices()[i];
        out << i + 1 << ' ' << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    out << "$EndNodes\n";

    out << "$Elements\n" << mesh.triangles().size() << "\n";
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t)
    {
        const auto& tri = mesh.triangles()[t];
        out << t + 1 << " 2 2 " << tag_of(tri.role) << ' ' << tag_of(tri.role) << ' ' << tri.v[0] + 1
            << ' ' << tri.v[1] + 1 << ' ' << tri.v[2] + 1 << '\n';
    }
    out << "$EndElements\n";
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace mtfcma
