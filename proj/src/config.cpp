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

#include "mtfcma/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

using nlohmann::json;

namespace
{

class TomlReader
{
  public:
    TomlReader(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    json run()
    {
        json root = json::object();
        json* table = &root;
        std::istringstream in(text_);
        std::string raw;
        while (std::getline(in, raw))
        {
            ++line_;
            s_ = raw;
            pos_ = 0;
            skip_ws();
            if (at_end_or_comment())
                continue;
            if (s_[pos_] == '[')
            {
                ++pos_;
                if (pos_ < s_.size() && s_[pos_] == '[')
                    fail("arrays of tables are not supported");
                const auto path = read_key_path(']');
                expect(']');
                finish_line();
                std::string joined;
                for (const auto& k : path)
                    joined += (joined.empty() ? "" : ".") + k;
                if (!headers_.insert(joined).second)
                    fail("table [" + joined + "] defined twice");
                table = &descend(root, path, joined);
                continue;
            }
            const auto path = read_key_path('=');
            expect('=');
            skip_ws();
            json value = read_value();
            finish_line();
            json* t = table;
            std::string joined;
            for (std::size_t i = 0; i + 1 < path.size(); ++i)
            {
                joined += path[i] + ".";
                t = &child_table(*t, path[i], joined);
            }
            if (t->contains(path.back()))
                fail("duplicate key '" + joined + path.back() + "'");
            (*t)[path.back()] = std::move(value);
        }
        return root;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError(origin_ + ":" + std::to_string(line_) + ": " + what);
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r'))
            ++pos_;
    }

    bool at_end_or_comment() const { return pos_ >= s_.size() || s_[pos_] == '#'; }

    void expect(char c)
    {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void finish_line()
    {
        skip_ws();
        if (!at_end_or_comment())
            fail("unexpected text '" + s_.substr(pos_) + "'");
    }

    json& child_table(json& parent, const std::string& key, const std::string& joined)
    {
        if (!parent.contains(key))
            parent[key] = json::object();
        json& c = parent[key];
        if (!c.is_object())
            fail("'" + joined + "' is not a table");
        return c;
    }

    json& descend(json& root, const std::vector<std::string>& path, const std::string& joined)
    {
        json* t = &root;
        for (const auto& k : path)
            t = &child_table(*t, k, joined);
        return *t;
    }

    std::vector<std::string> read_key_path(char terminator)
    {
        std::vector<std::string> keys;
        for (;;)
        {
            skip_ws();
            if (pos_ >= s_.size())
                fail("unterminated key");
            std::string key;
            if (s_[pos_] == '"' || s_[pos_] == '\'')
                key = read_string();
            else
            {
                const std::size_t b = pos_;
                while (pos_ < s_.size() &&
                       (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
                    ++pos_;
                key = s_.substr(b, pos_ - b);
                if (key.empty())
                    fail("missing key");
            }
            keys.push_back(key);
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '.')
            {
                ++pos_;
                continue;
            }
            if (pos_ >= s_.size() || s_[pos_] != terminator)
                fail(std::string("expected '") + terminator + "' after key '" + key + "'");
            return keys;
        }
    }

    std::string read_string()
    {
        const char q = s_[pos_++];
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != q)
        {
            char c = s_[pos_++];
            if (q == '"' && c == '\\')
            {
                if (pos_ >= s_.size())
                    break;
                c = s_[pos_++];
                switch (c)
                {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"':
                case '\\': break;
                default: fail(std::string("unsupported escape \\") + c);
                }
            }
            out += c;
        }
        if (pos_ >= s_.size())
            fail("unterminated string");
        ++pos_;
        return out;
    }

    json read_value()
    {
        if (pos_ >= s_.size())
            fail("missing value");
        const char c = s_[pos_];
        if (c == '"' || c == '\'')
            return read_string();
        if (c == '[')
        {
            ++pos_;
            json arr = json::array();
            for (;;)
            {
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == ']')
                {
                    ++pos_;
                    return arr;
                }
                if (pos_ < s_.size() && s_[pos_] == '[')
                    fail("nested arrays are not supported");
                arr.push_back(read_value());
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == ',')
                    ++pos_;
                else if (pos_ >= s_.size() || s_[pos_] != ']')
                    fail("expected ',' or ']' in array");
            }
        }
        if (c == '{')
            fail("inline tables are not supported");
        const std::size_t b = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#')
            ++pos_;
        std::string tok = s_.substr(b, pos_ - b);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back())))
            tok.pop_back();
        if (tok == "true")
            return true;
        if (tok == "false")
            return false;
        return read_number(tok);
    }

    json read_number(std::string tok)
    {
        tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
        if (tok.empty())
            fail("missing value");
        std::size_t end = 0;
        while (end < tok.size() && (std::isdigit(static_cast<unsigned char>(tok[end])) || tok[end] == '+' ||
                                    tok[end] == '-' || tok[end] == '.' || tok[end] == 'e' || tok[end] == 'E'))
            ++end;
        // "1e9" is fine but "1GHz" must stop before the unit
        std::string num = tok.substr(0, end), unit = tok.substr(end);
        if (!unit.empty() && !num.empty() && (num.back() == 'e' || num.back() == 'E'))
            fail("bad number '" + tok + "'");
        while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.front())))
            unit.erase(unit.begin());
        const bool integral = num.find_first_of(".eE") == std::string::npos;
        const char* first = num.data() + (num.size() > 0 && num[0] == '+' ? 1 : 0);
        const char* last = num.data() + num.size();
        if (unit.empty() && integral)
        {
            long long v = 0;
            auto [p, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || p != last)
                fail("bad number '" + tok + "'");
            return v;
        }
        double v = 0.0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || p != last || num.empty())
            fail("bad value '" + tok + "'");
        if (!unit.empty())
        {
            const double m = unit_scale(unit);
            if (m == 0.0)
                fail("unknown unit '" + unit + "'");
            v *= m;
        }
        return v;
    }

  public:
    static double unit_scale(std::string unit)
    {
        std::transform(unit.begin(), unit.end(), unit.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (unit == "hz")
            return 1.0;
        if (unit == "khz")
            return 1e3;
        if (unit == "mhz")
            return 1e6;
        if (unit == "ghz")
            return 1e9;
        return 0.0;
    }

  private:
    const std::string& text_;
    std::string origin_;
    std::string s_;
    std::size_t pos_ = 0;
    int line_ = 0;
    std::set<std::string> headers_;
};

[[noreturn]] void bad(const std::string& key, const std::string& what)
{
    throw ConfigError("config key '" + key + "': " + what);
}

double number(const json& v, const std::string& key)
{
    if (!v.is_number())
        bad(key, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& key)
{
    if (!v.is_number_integer())
        bad(key, "expected an integer");
    return v.get<int>();
}

Vec3 vec3(const json& v, const std::string& key)
{
    if (!v.is_array() || v.size() != 3)
        bad(key, "expected an array of three numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i)
        out(i) = number(v[static_cast<std::size_t>(i)], key);
    return out;
}

const json& table(const json& doc, const std::string& key, const std::set<std::string>& allowed)
{
    static const json empty = json::object();
    if (!doc.contains(key))
        return empty;
    const json& t = doc.at(key);
    if (!t.is_object())
        bad(key, "expected a table");
    for (const auto& [k, v] : t.items())
        if (!allowed.count(k))
            bad(key + "." + k, "unknown key");
    return t;
}

} // namespace

json parse_toml(const std::string& text, const std::string& origin)
{
    return TomlReader(text, origin).run();
}

json read_toml(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str(), path.string());
}

double parse_frequency(const json& value, const std::string& key)
{
    if (value.is_number())
        return value.get<double>();
    if (!value.is_string())
        bad(key, "expected a frequency");
    const std::string s = value.get<std::string>();
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data() + b, s.data() + s.size(), v);
    if (ec != std::errc())
        bad(key, "bad frequency '" + s + "'");
    std::string unit(p, s.data() + s.size());
    unit.erase(std::remove_if(unit.begin(), unit.end(), [](unsigned char c) { return std::isspace(c); }), unit.end());
    if (unit.empty())
        return v;
    const double m = TomlReader::unit_scale(unit);
    if (m == 0.0)
        bad(key, "unknown unit '" + unit + "'");
    return v * m;
}

std::vector<double> RunConfig::frequencies() const
{
    std::vector<double> f;
    const long n = static_cast<long>(std::floor((f_stop - f_start) / f_step * (1.0 + 1e-9) + 1e-9));
    for (long i = 0; i <= n; ++i)
        f.push_back(f_start + static_cast<double>(i) * f_step);
    return f;
}

void RunConfig::validate() const
{
    if (mesh_path.empty())
        bad("mesh.path", "missing");
    if (tags.empty())
        bad("mesh.tags", "at least one physical group must be mapped");
    if (!(mesh_scale > 0.0))
        bad("mesh.scale", "must be positive");
    if (!(media.interior.eps_r >= 1.0) || !std::isfinite(media.interior.eps_r))
        bad("media.eps_r", "must be >= 1");
    if (!(media.interior.mu_r > 0.0) || !std::isfinite(media.interior.mu_r))
        bad("media.mu_r", "must be positive");
    if (!(f_start > 0.0))
        bad("frequency.start", "must be positive");
    if (!(f_start < f_stop))
        bad("frequency.stop", "must exceed frequency.start");
    if (!(f_step > 0.0))
        bad("frequency.step", "must be positive");
    if (f_single < 0.0)
        bad("frequency.single", "must be positive");
    if (mode_count < 1)
        bad("cma.modes", "must be at least 1");
    if (!(rank_tol > 0.0 && rank_tol < 1.0))
        bad("cma.rank_tol", "must lie in (0, 1)");
    if (candidates < 0)
        bad("cma.candidates", "must be non-negative");
    if (assembly.regular_degree < 1 || assembly.regular_degree > 8)
        bad("assembly.regular_degree", "must lie in 1..8");
    if (assembly.near_degree < 1 || assembly.near_degree > 8)
        bad("assembly.near_degree", "must lie in 1..8");
    if (assembly.singular_order < 1 || assembly.singular_order > 32)
        bad("assembly.singular_order", "must lie in 1..32");
    if (assembly.close_order < 1 || assembly.close_order > 32)
        bad("assembly.close_order", "must lie in 1..32");
    if (!(assembly.near_factor >= 0.0))
        bad("assembly.near_factor", "must be non-negative");
    if (threads < 0)
        bad("run.threads", "must be non-negative");
    if (!(scatter.theta_step_deg > 0.0))
        bad("scatter.theta_step", "must be positive");
    try
    {
        scatter.wave.validate();
    }
    catch (const Error& e)
    {
        bad("scatter.direction", e.what());
    }
}

RunConfig load_config(const json& doc, const std::filesystem::path& origin)
{
    if (!doc.is_object())
        throw ConfigError("config root must be a table");
    static const std::set<std::string> sections{"mesh", "media", "frequency", "cma", "assembly", "run", "scatter"};
    for (const auto& [k, v] : doc.items())
        if (!sections.count(k))
            bad(k, "unknown section");

    RunConfig c;
    c.config_path = origin;
    c.raw = doc;

    const json& mesh = table(doc, "mesh", {"path", "scale", "tags"});
    if (mesh.contains("path"))
    {
        if (!mesh["path"].is_string())
            bad("mesh.path", "expected a string");
        c.mesh_path = mesh["path"].get<std::string>();
        if (c.mesh_path.is_relative() && !origin.empty())
            c.mesh_path = origin.parent_path() / c.mesh_path;
    }
    if (mesh.contains("scale"))
        c.mesh_scale = number(mesh["scale"], "mesh.scale");
    if (mesh.contains("tags"))
    {
        if (!mesh["tags"].is_object())
            bad("mesh.tags", "expected a table");
        for (const auto& [name, role] : mesh["tags"].items())
        {
            if (!role.is_string())
                bad("mesh.tags." + name, "expected a role name");
            try
            {
                c.tags[name] = parse_surface_role(role.get<std::string>());
            }
            catch (const Error& e)
            {
                bad("mesh.tags." + name, e.what());
            }
        }
    }

    const json& media = table(doc, "media", {"eps_r", "mu_r"});
    if (media.contains("eps_r"))
        c.media.interior.eps_r = number(media["eps_r"], "media.eps_r");
    if (media.contains("mu_r"))
        c.media.interior.mu_r = number(media["mu_r"], "media.mu_r");

    const json& fr = table(doc, "frequency", {"start", "stop", "step", "single"});
    if (fr.contains("start"))
        c.f_start = parse_frequency(fr["start"], "frequency.start");
    if (fr.contains("stop"))
        c.f_stop = parse_frequency(fr["stop"], "frequency.stop");
    if (fr.contains("step"))
        c.f_step = parse_frequency(fr["step"], "frequency.step");
    if (fr.contains("single"))
        c.f_single = parse_frequency(fr["single"], "frequency.single");

    const json& cma = table(doc, "cma", {"modes", "rank_tol", "candidates"});
    if (cma.contains("modes"))
        c.mode_count = integer(cma["modes"], "cma.modes");
    if (cma.contains("rank_tol"))
        c.rank_tol = number(cma["rank_tol"], "cma.rank_tol");
    if (cma.contains("candidates"))
        c.candidates = integer(cma["candidates"], "cma.candidates");

    const json& as = table(doc, "assembly", {"regular_degree", "near_degree", "singular_order", "close_order", "near_factor"});
    if (as.contains("regular_degree"))
        c.assembly.regular_degree = integer(as["regular_degree"], "assembly.regular_degree");
    if (as.contains("near_degree"))
        c.assembly.near_degree = integer(as["near_degree"], "assembly.near_degree");
    if (as.contains("singular_order"))
        c.assembly.singular_order = integer(as["singular_order"], "assembly.singular_order");
    if (as.contains("close_order"))
        c.assembly.close_order = integer(as["close_order"], "assembly.close_order");
    if (as.contains("near_factor"))
        c.assembly.near_factor = number(as["near_factor"], "assembly.near_factor");

    const json& run = table(doc, "run", {"threads", "out"});
    if (run.contains("threads"))
        c.threads = integer(run["threads"], "run.threads");
    if (run.contains("out"))
    {
        if (!run["out"].is_string())
            bad("run.out", "expected a string");
        c.out_dir = run["out"].get<std::string>();
    }

    const json& sc = table(doc, "scatter", {"direction", "polarization", "amplitude", "theta_step", "phi"});
    if (sc.contains("direction"))
        c.scatter.wave.direction = vec3(sc["direction"], "scatter.direction");
    if (sc.contains("polarization"))
        c.scatter.wave.polarization = vec3(sc["polarization"], "scatter.polarization");
    if (sc.contains("amplitude"))
        c.scatter.wave.amplitude = number(sc["amplitude"], "scatter.amplitude");
    if (sc.contains("theta_step"))
        c.scatter.theta_step_deg = number(sc["theta_step"], "scatter.theta_step");
    if (sc.contains("phi"))
    {
        if (!sc["phi"].is_array() || sc["phi"].empty())
            bad("scatter.phi", "expected a non-empty array");
        c.scatter.phi_deg.clear();
        for (const auto& v : sc["phi"])
            c.scatter.phi_deg.push_back(number(v, "scatter.phi"));
    }
    c.assembly.threads = c.threads;
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    return load_config(read_toml(path), path);
}

} // namespace mtfcma
