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

#include "mtfcma/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

namespace
{

const CVector& coefficients_for(const RwgBasis& basis, const CurrentSolution& s, UnknownGroup g)
{
    const CVector& c = s.group(g);
    if (basis.size(g) == 0 || c.size() != basis.size(g))
    {
        std::ostringstream os;
        os << "no coefficients for group " << to_string(g) << " (have " << c.size() << ", basis has "
           << basis.size(g) << ")";
        throw MissingGroupError(os.str());
    }
    return c;
}

// Sum of c_q f_q at r and the surface divergence on triangle t.
std::pair<CVec3, Complex> current_at(const TaggedMesh& mesh, const RwgBasis& basis, SurfaceRole role,
                                     const CVector& c, int t, const Vec3& r)
{
    const Triangle& tri = mesh.triangle(t);
    CVec3 j = CVec3::Zero();
    Complex div = 0.0;
    for (const RwgHalf& h : basis.halves(t))
    {
        const RwgFunction& f = basis.functions(role)[static_cast<std::size_t>(h.function)];
        const double a = h.sign * f.length / (2.0 * tri.area);
        const Complex cq = c(h.function);
        j += (cq * a) * (r - mesh.corner(t, h.local)).cast<Complex>();
        div += cq * (2.0 * a);
    }
    return {j, div};
}

UnknownGroup electric_group(SurfaceRole role)
{
    switch (role)
    {
    case SurfaceRole::Radiator: return UnknownGroup::Jr;
    case SurfaceRole::Ground: return UnknownGroup::Jg;
    case SurfaceRole::Dielectric: return UnknownGroup::Jd;
    }
    return UnknownGroup::Jd;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path)
{
    out.close();
    if (!out)
        throw IoError("write failed: " + path.string());
}

} // namespace

SurfaceCurrentMap eigencurrent_map(const TaggedMesh& mesh, const RwgBasis& basis, UnknownGroup group,
                                   const CVector& coefficients)
{
    if (basis.size(group) == 0 || coefficients.size() != basis.size(group))
    {
        std::ostringstream os;
        os << "no coefficients for group " << to_string(group) << " (have " << coefficients.size()
           << ", basis has " << basis.size(group) << ")";
        throw MissingGroupError(os.str());
    }
    const SurfaceRole role = role_of(group);
    SurfaceCurrentMap map;
    map.group = group;
    map.triangles = mesh.triangles_with(role);
    map.value.reserve(map.triangles.size());
    map.magnitude.reserve(map.triangles.size());
    for (int t : map.triangles)
    {
        const CVec3 v = current_at(mesh, basis, role, coefficients, t, mesh.centroid(t)).first;
        map.value.push_back(v);
        map.magnitude.push_back(v.norm());
    }
    return map;
}

SurfaceCurrentMap eigencurrent_map(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& solution,
                                   UnknownGroup group)
{
    return eigencurrent_map(mesh, basis, group, coefficients_for(basis, solution, group));
}

// ---------------------------------------------------------------------------

FarFieldGrid FarFieldGrid::cuts(double step_deg)
{
    if (!(step_deg > 0.0))
        throw DomainError("angular step must be positive");
    FarFieldGrid g;
    const int n = static_cast<int>(std::lround(180.0 / step_deg));
    for (int i = 0; i <= n; ++i)
        g.theta_deg.push_back(std::min(180.0, i * step_deg));
    g.phi_deg = {0.0, 90.0};
    return g;
}

FarFieldGrid FarFieldGrid::single(double theta_deg, double phi_deg)
{
    return FarFieldGrid{{theta_deg}, {phi_deg}};
}

void FarFieldGrid::validate() const
{
    if (theta_deg.empty() || phi_deg.empty())
        throw DimensionError("empty angular grid");
    for (double v : theta_deg)
        if (!std::isfinite(v))
            throw DomainError("non-finite theta");
    for (double v : phi_deg)
        if (!std::isfinite(v))
            throw DomainError("non-finite phi");
}

double FarFieldPattern::magnitude(Eigen::Index it, Eigen::Index ip) const
{
    return std::sqrt(std::norm(e_theta(it, ip)) + std::norm(e_phi(it, ip)));
}

Vec3 direction(double theta_deg, double phi_deg)
{
    const double t = theta_deg * pi / 180.0, p = phi_deg * pi / 180.0;
    return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

Vec3 theta_hat(double theta_deg, double phi_deg)
{
    const double t = theta_deg * pi / 180.0, p = phi_deg * pi / 180.0;
    return {std::cos(t) * std::cos(p), std::cos(t) * std::sin(p), -std::sin(t)};
}

Vec3 phi_hat(double /*theta_deg*/, double phi_deg)
{
    const double p = phi_deg * pi / 180.0;
    return {-std::sin(p), std::cos(p), 0.0};
}

FarFieldPattern far_field(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& currents,
                          double freq_hz, const FarFieldGrid& grid, int degree)
{
    grid.validate();
    if (!(freq_hz > 0.0))
        throw DomainError("frequency must be positive");
    const double k = 2.0 * pi * freq_hz / c0;

    // sample points carrying J and M/eta0
    struct Sample
    {
        Vec3 r;
        CVec3 j;
        CVec3 m;
    };
    std::vector<Sample> samples;
    const QuadratureRule& rule = triangle_rule(degree);
    for (SurfaceRole role : {SurfaceRole::Dielectric, SurfaceRole::Ground, SurfaceRole::Radiator})
    {
        const UnknownGroup eg = electric_group(role);
        if (basis.size(eg) == 0)
            continue;
        if (currents.group(eg).size() != basis.size(eg))
            throw DimensionError(std::string("coefficient count mismatch for ") + std::string(to_string(eg)));
        const bool magnetic = role == SurfaceRole::Dielectric;
        if (magnetic && currents.Md.size() != basis.size(UnknownGroup::Md))
            throw DimensionError("coefficient count mismatch for Md");
        for (int t : mesh.triangles_with(role))
        {
            if (basis.halves(t).empty())
                continue;
            const Triangle& tri = mesh.triangle(t);
            for (std::size_t q = 0; q < rule.size(); ++q)
            {
                const auto& b = rule.points[q];
                const Vec3 r = b[0] * mesh.corner(t, 0) + b[1] * mesh.corner(t, 1) + b[2] * mesh.corner(t, 2);
                const double w = rule.weights[q] * tri.area;
                Sample s{r, w * current_at(mesh, basis, role, currents.group(eg), t, r).first, CVec3::Zero()};
                if (magnetic)
                    s.m = w * current_at(mesh, basis, role, currents.Md, t, r).first;
                samples.push_back(s);
            }
        }
    }

    FarFieldPattern pat;
    pat.grid = grid;
    pat.frequency = freq_hz;
    const auto nt = static_cast<Eigen::Index>(grid.theta_deg.size());
    const auto np = static_cast<Eigen::Index>(grid.phi_deg.size());
    pat.e_theta.resize(nt, np);
    pat.e_phi.resize(nt, np);
    const Complex pref = -j_unit * k * eta0 / (4.0 * pi);
    const Eigen::Index total = nt * np;

#pragma omp parallel for schedule(static)
    for (Eigen::Index idx = 0; idx < total; ++idx)
    {
        const Eigen::Index it = idx / np, ip = idx % np;
        const double th = grid.theta_deg[static_cast<std::size_t>(it)];
        const double ph = grid.phi_deg[static_cast<std::size_t>(ip)];
        const Vec3 rh = direction(th, ph);
        CVec3 N = CVec3::Zero(), L = CVec3::Zero();
        for (const Sample& s : samples)
        {
            const Complex e = std::exp(j_unit * (k * rh.dot(s.r)));
            N += e * s.j;
            L += e * s.m;
        }
        const CVec3 tt = theta_hat(th, ph).cast<Complex>(), pp = phi_hat(th, ph).cast<Complex>();
        const Complex Nt = tt.dot(N), Np = pp.dot(N), Lt = tt.dot(L), Lp = pp.dot(L);
        pat.e_theta(it, ip) = pref * (Nt + Lp);
        pat.e_phi(it, ip) = pref * (Np - Lt);
    }
    return pat;
}

FarFieldPattern normalize(const FarFieldPattern& pattern)
{
    double peak = 0.0;
    for (Eigen::Index i = 0; i < pattern.e_theta.rows(); ++i)
        for (Eigen::Index j = 0; j < pattern.e_theta.cols(); ++j)
            peak = std::max(peak, pattern.magnitude(i, j));
    FarFieldPattern out = pattern;
    if (peak > 0.0)
    {
        out.e_theta /= peak;
        out.e_phi /= peak;
    }
    out.normalized = true;
    return out;
}

RMatrix rcs(const FarFieldPattern& pattern, Complex amplitude)
{
    if (pattern.normalized)
        throw NormalizationError("RCS needs an absolute far-field pattern");
    const double a2 = std::norm(amplitude);
    if (!(a2 > 0.0))
        throw DomainError("zero excitation amplitude");
    RMatrix s(pattern.e_theta.rows(), pattern.e_theta.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j)
            s(i, j) = 4.0 * pi * (std::norm(pattern.e_theta(i, j)) + std::norm(pattern.e_phi(i, j))) / a2;
    return s;
}

double scattering_cross_section(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& currents,
                                double freq_hz, Complex amplitude, int n_theta, int n_phi)
{
    if (n_theta < 2 || n_phi < 2)
        throw DomainError("angular quadrature too coarse");
    const GaussRule gl = gauss_legendre(n_theta);
    FarFieldGrid grid;
    for (double x : gl.x)
        grid.theta_deg.push_back(std::acos(2.0 * x - 1.0) * 180.0 / pi);
    for (int j = 0; j < n_phi; ++j)
        grid.phi_deg.push_back(360.0 * j / n_phi);
    const RMatrix s = rcs(far_field(mesh, basis, currents, freq_hz, grid), amplitude);
    double total = 0.0;
    for (int i = 0; i < n_theta; ++i)
        total += 2.0 * gl.w[static_cast<std::size_t>(i)] * (2.0 * pi / n_phi) * s.row(i).sum();
    return total / (4.0 * pi);
}

double extinction_cross_section(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& currents,
                                const PlaneWave& wave, double freq_hz)
{
    wave.validate();
    const Vec3& d = wave.direction;
    const double th = std::acos(std::clamp(d.z(), -1.0, 1.0)) * 180.0 / pi;
    const double ph = std::atan2(d.y(), d.x()) * 180.0 / pi;
    const FarFieldPattern f = far_field(mesh, basis, currents, freq_hz, FarFieldGrid::single(th, ph));
    const CVec3 F = f.e_theta(0, 0) * theta_hat(th, ph).cast<Complex>() + f.e_phi(0, 0) * phi_hat(th, ph).cast<Complex>();
    const double k = 2.0 * pi * freq_hz / c0;
    return -(4.0 * pi / k) * (wave.polarization.cast<Complex>().dot(F) / wave.amplitude).imag();
}

SurfaceSources exterior_sources(const CurrentSolution& currents)
{
    SurfaceSources s;
    s.electric = {{SurfaceRole::Dielectric, currents.Jd},
                  {SurfaceRole::Ground, currents.Jg},
                  {SurfaceRole::Radiator, currents.Jr}};
    s.magnetic = currents.Md;
    return s;
}

CVec3 radiated_field(const TaggedMesh& mesh, const RwgBasis& basis, const SurfaceSources& sources,
                     const Medium& medium, double freq_hz, const Vec3& r, int degree)
{
    medium.validate();
    const double k = medium.wavenumber(freq_hz);
    const double eta = medium.impedance();
    const QuadratureRule& rule = triangle_rule(degree);

    CVec3 a = CVec3::Zero();     // int J G
    CVec3 phi = CVec3::Zero();   // int div J grad G
    CVec3 curl = CVec3::Zero();  // int grad G x M
    auto visit = [&](SurfaceRole role, const CVector& c, bool magnetic) {
        if (c.size() == 0)
            return;
        if (c.size() != static_cast<Eigen::Index>(basis.count(role)))
            throw DimensionError("source coefficient count mismatch");
        for (int t : mesh.triangles_with(role))
        {
            if (basis.halves(t).empty())
                continue;
            const double area = mesh.triangle(t).area;
            for (std::size_t q = 0; q < rule.size(); ++q)
            {
                const auto& b = rule.points[q];
                const Vec3 rp = b[0] * mesh.corner(t, 0) + b[1] * mesh.corner(t, 1) + b[2] * mesh.corner(t, 2);
                const double w = rule.weights[q] * area;
                const auto [jv, div] = current_at(mesh, basis, role, c, t, rp);
                const CVec3 gg = grad_green(k, r, rp);
                if (magnetic)  // Eigen's complex cross conjugates, so spell it out
                    curl += w * CVec3(gg.y() * jv.z() - gg.z() * jv.y(), gg.z() * jv.x() - gg.x() * jv.z(),
                                      gg.x() * jv.y() - gg.y() * jv.x());
                else
                {
                    a += (w * green(k, r, rp)) * jv;
                    phi += (w * div) * gg;
                }
            }
        }
    };
    for (const auto& [role, c] : sources.electric)
        visit(role, c, false);
    visit(SurfaceRole::Dielectric, sources.magnetic, true);
    return eta * (-j_unit * k * a - (j_unit / k) * phi) - eta0 * curl;
}

// ---------------------------------------------------------------------------

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_ms_csv(const SweepResult& sweep, int mode_count, const std::filesystem::path& path)
{
    auto out = open_out(path);
    const int n = std::min<int>(mode_count, static_cast<int>(sweep.tracked.size()));
    out << "freq_hz";
    for (int m = 1; m <= mode_count; ++m)
        out << ",mode_" << m;
    out << '\n';
    for (std::size_t k = 0; k < sweep.frequencies.size(); ++k)
    {
        out << format_double(sweep.frequencies[k]);
        for (int m = 1; m <= mode_count; ++m)
            out << ',' << format_double(m <= n ? sweep.ms(m, k) : std::nan(""));
        out << '\n';
    }
    close_out(out, path);
}

MsTable read_ms_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path.string());
    MsTable t;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty file");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            t.header.push_back(cell);
    }
    if (t.header.empty() || t.header[0] != "freq_hz")
        throw ParseError(path.string() + ":1: expected freq_hz header");
    t.ms.resize(t.header.size() - 1);
    int lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ','))
        {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
        t.frequency.push_back(row[0]);
        for (std::size_t m = 1; m < row.size(); ++m)
            t.ms[m - 1].push_back(row[m]);
    }
    return t;
}

void write_resonances_csv(const SweepResult& sweep, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "mode_id,freq_hz,lambda,ms\n";
    for (const auto& r : sweep.resonances)
        out << r.mode_id << ',' << format_double(r.frequency) << ',' << format_double(r.lambda) << ','
            << format_double(modal_significance(r.lambda)) << '\n';
    close_out(out, path);
}

void write_vtk(const TaggedMesh& mesh, const SurfaceCurrentMap& map, const std::filesystem::path& path,
               const std::string& field_name)
{
    if (map.triangles.size() != map.magnitude.size())
        throw DimensionError("current map is inconsistent");
    std::map<int, int> local;
    std::vector<int> points;
    for (int t : map.triangles)
        for (int v : mesh.triangle(t).v)
            if (local.emplace(v, static_cast<int>(points.size())).second)
                points.push_back(v);

    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\n"
        << to_string(map.group) << " current\n"
        << "ASCII\nDATASET POLYDATA\n";
    out << "POINTS " << points.size() << " double\n";
    for (int v : points)
    {
        const Vec3& p = mesh.vertex(v);
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
    }
    out << "POLYGONS " << map.triangles.size() << ' ' << 4 * map.triangles.size() << '\n';
    for (int t : map.triangles)
    {
        const auto& v = mesh.triangle(t).v;
        out << "3 " << local[v[0]] << ' ' << local[v[1]] << ' ' << local[v[2]] << '\n';
    }
    out << "CELL_DATA " << map.triangles.size() << '\n'
        << "SCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
    for (double m : map.magnitude)
        out << format_double(m) << '\n';
    close_out(out, path);
}

void write_far_field_csv(const FarFieldPattern& pattern, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "theta_deg,phi_deg,Etheta_re,Etheta_im,Ephi_re,Ephi_im\n";
    for (std::size_t ip = 0; ip < pattern.grid.phi_deg.size(); ++ip)
        for (std::size_t it = 0; it < pattern.grid.theta_deg.size(); ++it)
        {
            const auto i = static_cast<Eigen::Index>(it), j = static_cast<Eigen::Index>(ip);
            out << format_double(pattern.grid.theta_deg[it]) << ',' << format_double(pattern.grid.phi_deg[ip]) << ','
                << format_double(pattern.e_theta(i, j).real()) << ',' << format_double(pattern.e_theta(i, j).imag())
                << ',' << format_double(pattern.e_phi(i, j).real()) << ','
                << format_double(pattern.e_phi(i, j).imag()) << '\n';
        }
    close_out(out, path);
}

void write_rcs_csv(const FarFieldGrid& grid, const RMatrix& sigma, const std::filesystem::path& path)
{
    if (sigma.rows() != static_cast<Eigen::Index>(grid.theta_deg.size()) ||
        sigma.cols() != static_cast<Eigen::Index>(grid.phi_deg.size()))
        throw DimensionError("RCS matrix does not match the grid");
    auto out = open_out(path);
    out << "theta_deg,phi_deg,rcs_m2,rcs_dbsm\n";
    for (std::size_t ip = 0; ip < grid.phi_deg.size(); ++ip)
        for (std::size_t it = 0; it < grid.theta_deg.size(); ++it)
        {
            const double s = sigma(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(ip));
            out << format_double(grid.theta_deg[it]) << ',' << format_double(grid.phi_deg[ip]) << ','
                << format_double(s) << ',' << format_double(10.0 * std::log10(std::max(s, 1e-300))) << '\n';
        }
    close_out(out, path);
}

void write_ms_svg(const SweepResult& sweep, int mode_count, const std::filesystem::path& path)
{
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    const double W = 800, H = 480, left = 70, right = 130, top = 30, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    double f0 = sweep.frequencies.front(), f1 = sweep.frequencies.back();
    if (f1 <= f0)
        f1 = f0 + 1.0;
    auto X = [&](double f) { return left + pw * (f - f0) / (f1 - f0); };
    auto Y = [&](double m) { return top + ph * (1.0 - m); };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
        << "\" height=\"" << ph << "\"/></g>\n"
        << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i <= 5; ++i)
    {
        const double m = i / 5.0;
        out << "<text x=\"" << left - 8 << "\" y=\"" << Y(m) + 4 << "\" text-anchor=\"end\">" << m << "</text>\n";
        const double f = f0 + (f1 - f0) * i / 5.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", f / 1e9);
        out << "<text x=\"" << X(f) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << buf
            << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">Frequency (GHz)</text>\n"
        << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << top + ph / 2 << ")\">Modal significance</text>\n</g>\n";

    const int n = std::min<int>(mode_count, static_cast<int>(sweep.tracked.size()));
    for (int m = 1; m <= n; ++m)
    {
        const char* colour = palette[(m - 1) % 10];
        std::string pts;
        auto flush = [&]() {
            if (!pts.empty())
                out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << pts
                    << "\"/>\n";
            pts.clear();
        };
        for (std::size_t k = 0; k < sweep.frequencies.size(); ++k)
        {
            const double v = sweep.ms(m, k);
            if (std::isnan(v))
            {
                flush();
                continue;
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(sweep.frequencies[k]), Y(v));
            pts += buf;
        }
        flush();
        out << "<text font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colour << "\" x=\"" << left + pw + 10
            << "\" y=\"" << top + 14 * m << "\">mode " << m << "</text>\n";
    }
    out << "</svg>\n";
    close_out(out, path);
}

} // namespace mtfcma
