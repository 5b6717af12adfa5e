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

#include "mtfcma/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <omp.h>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

namespace
{

using Idx = Eigen::Index;
using CV3 = Eigen::Matrix<Complex, 3, 1>;

constexpr double inv4pi = 1.0 / (4.0 * pi);

// Integrals over an (outer, inner) triangle pair, local vertex indices i (outer), j (inner):
//   a[3i+j] = int int (r - p_i).(r' - q_j) G      phi = int int G
//   b[3i+j] = int int (r - p_i).(grad G x (r' - q_j))
template <class T>
struct PairSums
{
    std::array<T, 9> a{};
    std::array<T, 9> b{};
    T phi{};
};

// Running sums in centroid-relative coordinates u = r - c, v = r' - c'
// with d = r - r' and grad G = g d.
template <class T>
struct Accumulator
{
    using V3 = Eigen::Matrix<T, 3, 1>;
    T p0{}, puv{};
    V3 pu = V3::Zero(), pv = V3::Zero();
    T k0{};
    V3 k1 = V3::Zero(), k2 = V3::Zero(), k3 = V3::Zero();

    void add_value(T wg, const Vec3& u, const Vec3& v)
    {
        p0 += wg;
        puv += wg * u.dot(v);
        pu += wg * u.template cast<T>();
        pv += wg * v.template cast<T>();
    }

    void add_gradient(T wg, const Vec3& u, const Vec3& v, const Vec3& d)
    {
        k0 += wg * d.dot(v.cross(u));
        k1 += wg * u.cross(d).template cast<T>();
        k2 += wg * d.cross(v).template cast<T>();
        k3 += wg * d.template cast<T>();
    }

    // nu_i = p_i - c, mu_j = q_j - c'
    void finish(const std::array<Vec3, 3>& nu, const std::array<Vec3, 3>& mu, bool values, bool grads,
                PairSums<T>& out, T scale = T(1)) const
    {
        if (values)
        {
            out.phi += scale * p0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                {
                    const auto& n = nu[static_cast<std::size_t>(i)];
                    const auto& m = mu[static_cast<std::size_t>(j)];
                    const T v = puv - m.template cast<T>().dot(pu) - n.template cast<T>().dot(pv) + n.dot(m) * p0;
                    out.a[static_cast<std::size_t>(3 * i + j)] += scale * v;
                }
        }
        if (grads)
        {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                {
                    const auto& n = nu[static_cast<std::size_t>(i)];
                    const auto& m = mu[static_cast<std::size_t>(j)];
                    const T v = k0 - m.template cast<T>().dot(k1) - n.template cast<T>().dot(k2) +
                                m.cross(n).template cast<T>().dot(k3);
                    out.b[static_cast<std::size_t>(3 * i + j)] += scale * v;
                }
        }
    }
};

struct TriGeom
{
    std::array<Vec3, 3> v;
    Vec3 c;
    Vec3 n;
    double area = 0.0;
    double diam = 0.0;
    std::array<Vec3, 3> nu;           // v - c
    std::vector<Vec3> rel;            // regular rule points minus centroid
    std::vector<double> w;            // regular rule weights times area
};

struct StaticPair
{
    int outer = -1;
    int inner = -1;
    int shared = 0;
    bool coplanar = false;
    PairSums<double> inv;   // kernel 1/(4 pi R)
    PairSums<double> lin;   // kernel R/(4 pi), touching pairs only
};

bool coplanar(const TriGeom& a, const TriGeom& b)
{
    const double size = std::max(a.diam, b.diam);
    return a.n.cross(b.n).norm() < 1e-10 && std::abs(a.n.dot(b.c - a.c)) < 1e-10 * size;
}

int shared_vertices(const Triangle& a, const Triangle& b, std::array<int, 3>& pa, std::array<int, 3>& pb)
{
    int n = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a.v[static_cast<std::size_t>(i)] == b.v[static_cast<std::size_t>(j)])
            {
                pa[static_cast<std::size_t>(n)] = i;
                pb[static_cast<std::size_t>(n)] = j;
                ++n;
                break;
            }
    auto complete = [n](std::array<int, 3>& p) {
        int m = n;
        for (int i = 0; i < 3 && m < 3; ++i)
        {
            bool used = false;
            for (int k = 0; k < m; ++k)
                used = used || p[static_cast<std::size_t>(k)] == i;
            if (!used)
                p[static_cast<std::size_t>(m++)] = i;
        }
    };
    complete(pa);
    complete(pb);
    return n;
}

} // namespace

// ---------------------------------------------------------------------------

struct Assembler::Cache
{
    std::vector<TriGeom> geom;
    std::vector<StaticPair> pairs;
    std::vector<std::vector<std::pair<int, int>>> neighbours;  // triangle -> (other, pair index)
    std::map<SurfaceRole, std::vector<std::vector<int>>> colours;
    std::size_t touching = 0;
};

namespace
{

void touching_static(const TaggedMesh& mesh, const std::vector<TriGeom>& geom, int order, StaticPair& sp)
{
    std::array<int, 3> pa{}, pb{};
    const int shared = shared_vertices(mesh.triangle(sp.outer), mesh.triangle(sp.inner), pa, pb);
    const PairRule& rule = sauter_schwab_rule(shared, order);
    const TriGeom& go = geom[static_cast<std::size_t>(sp.outer)];
    const TriGeom& gi = geom[static_cast<std::size_t>(sp.inner)];
    const double jac = 4.0 * go.area * gi.area;
    const bool grads = !sp.coplanar;

    Accumulator<double> inv, lin;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
        Vec3 u = Vec3::Zero(), v = Vec3::Zero();
        for (int k = 0; k < 3; ++k)
        {
            u += rule.x[q][static_cast<std::size_t>(k)] * go.nu[static_cast<std::size_t>(pa[static_cast<std::size_t>(k)])];
            v += rule.y[q][static_cast<std::size_t>(k)] * gi.nu[static_cast<std::size_t>(pb[static_cast<std::size_t>(k)])];
        }
        const Vec3 d = (go.c - gi.c) + u - v;
        const double R = d.norm();
        if (!(R > 0.0))
            continue;
        const double w = rule.w[q] * jac;
        inv.add_value(w * inv4pi / R, u, v);
        lin.add_value(w * inv4pi * R, u, v);
        if (grads)
        {
            inv.add_gradient(-w * inv4pi / (R * R * R), u, v, d);
            lin.add_gradient(w * inv4pi / R, u, v, d);
        }
    }
    inv.finish(go.nu, gi.nu, true, grads, sp.inv);
    lin.finish(go.nu, gi.nu, true, grads, sp.lin);
}

void near_static(const std::vector<TriGeom>& geom, int degree, StaticPair& sp)
{
    const QuadratureRule& rule = triangle_rule(degree);
    const TriGeom& go = geom[static_cast<std::size_t>(sp.outer)];
    const TriGeom& gi = geom[static_cast<std::size_t>(sp.inner)];
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
        const auto& l = rule.points[q];
        const Vec3 x = l[0] * go.v[0] + l[1] * go.v[1] + l[2] * go.v[2];
        const PanelPotentials pp = panel_potentials(gi.v[0], gi.v[1], gi.v[2], x);
        const double w = rule.weights[q] * go.area * inv4pi;
        sp.inv.phi += w * pp.scalar;
        for (int i = 0; i < 3; ++i)
        {
            const Vec3 xi = x - go.v[static_cast<std::size_t>(i)];
            for (int j = 0; j < 3; ++j)
            {
                const Vec3& qj = gi.v[static_cast<std::size_t>(j)];
                const auto ij = static_cast<std::size_t>(3 * i + j);
                sp.inv.a[ij] += w * xi.dot(pp.vector + (pp.projection - qj) * pp.scalar);
                if (!sp.coplanar)
                    sp.inv.b[ij] += w * xi.dot(pp.gradient.cross(x - qj));
            }
        }
    }
}

} // namespace

Assembler::Assembler(const TaggedMesh& mesh, const RwgBasis& basis, AssemblyOptions options)
    : mesh_(mesh), basis_(basis), options_(options), cache_(std::make_unique<Cache>())
{
    if (options_.near_factor < 0.0)
        throw DomainError("near_factor must be non-negative");
    const auto ntri = mesh.triangles().size();
    const QuadratureRule& rule = triangle_rule(options_.regular_degree);
    triangle_rule(options_.near_degree);
    if (options_.singular_order < 1 || options_.close_order < 1)
        throw DomainError("singular quadrature orders must be positive");
    sauter_schwab_rule(1, options_.singular_order);
    sauter_schwab_rule(2, options_.close_order);
    sauter_schwab_rule(3, options_.close_order);

    auto& geom = cache_->geom;
    geom.resize(ntri);
    for (std::size_t t = 0; t < ntri; ++t)
    {
        TriGeom& g = geom[t];
        for (int k = 0; k < 3; ++k)
            g.v[static_cast<std::size_t>(k)] = mesh.corner(static_cast<int>(t), k);
        g.c = mesh.centroid(static_cast<int>(t));
        g.n = mesh.triangle(static_cast<int>(t)).normal;
        g.area = mesh.triangle(static_cast<int>(t)).area;
        g.diam = mesh.diameter(static_cast<int>(t));
        for (int k = 0; k < 3; ++k)
            g.nu[static_cast<std::size_t>(k)] = g.v[static_cast<std::size_t>(k)] - g.c;
        for (std::size_t q = 0; q < rule.size(); ++q)
        {
            const auto& l = rule.points[q];
            g.rel.push_back(l[0] * g.nu[0] + l[1] * g.nu[1] + l[2] * g.nu[2]);
            g.w.push_back(rule.weights[q] * g.area);
        }
    }

    // near and touching pairs, outer = lower triangle id
    auto& pairs = cache_->pairs;
    for (std::size_t a = 0; a < ntri; ++a)
        for (std::size_t b = a; b < ntri; ++b)
        {
            const Triangle& ta = mesh.triangle(static_cast<int>(a));
            const Triangle& tb = mesh.triangle(static_cast<int>(b));
            std::array<int, 3> pa{}, pb{};
            const int shared = shared_vertices(ta, tb, pa, pb);
            const double dist = (geom[a].c - geom[b].c).norm();
            if (shared == 0 && !(dist < options_.near_factor * std::max(geom[a].diam, geom[b].diam)))
                continue;
            StaticPair sp;
            sp.outer = static_cast<int>(a);
            sp.inner = static_cast<int>(b);
            sp.shared = shared;
            sp.coplanar = coplanar(geom[a], geom[b]);
            pairs.push_back(sp);
        }

    const int threads = options_.threads > 0 ? options_.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::size_t p = 0; p < pairs.size(); ++p)
    {
        if (pairs[p].shared > 0)
            touching_static(mesh_, geom, pairs[p].shared == 1 ? options_.singular_order : options_.close_order,
                            pairs[p]);
        else
            near_static(geom, options_.near_degree, pairs[p]);
    }

    cache_->neighbours.assign(ntri, {});
    for (std::size_t p = 0; p < pairs.size(); ++p)
    {
        const auto& sp = pairs[p];
        cache_->touching += sp.shared > 0 ? 1 : 0;
        cache_->neighbours[static_cast<std::size_t>(sp.outer)].emplace_back(sp.inner, static_cast<int>(p));
        if (sp.inner != sp.outer)
            cache_->neighbours[static_cast<std::size_t>(sp.inner)].emplace_back(sp.outer, static_cast<int>(p));
    }

    // Colour test triangles so that no two triangles of one colour share a
    // basis function; rows written inside one colour are then disjoint.
    for (SurfaceRole role : {SurfaceRole::Radiator, SurfaceRole::Ground, SurfaceRole::Dielectric})
    {
        const auto& fns = basis.functions(role);
        std::vector<int> colour(ntri, -1);
        std::vector<std::vector<int>> groups;
        for (int t : mesh.triangles_with(role))
        {
            if (basis.halves(t).empty())
                continue;
            std::vector<bool> taken(groups.size() + 1, false);
            for (const auto& h : basis.halves(t))
            {
                const auto& f = fns[static_cast<std::size_t>(h.function)];
                for (int other : {f.tri_plus, f.tri_minus})
                {
                    const int c = colour[static_cast<std::size_t>(other)];
                    if (other != t && c >= 0)
                        taken[static_cast<std::size_t>(c)] = true;
                }
            }
            int c = 0;
            while (taken[static_cast<std::size_t>(c)])
                ++c;
            colour[static_cast<std::size_t>(t)] = c;
            if (c == static_cast<int>(groups.size()))
                groups.emplace_back();
            groups[static_cast<std::size_t>(c)].push_back(t);
        }
        cache_->colours[role] = std::move(groups);
    }
}

Assembler::~Assembler() = default;

std::size_t Assembler::near_pair_count() const
{
    return cache_->pairs.size() - cache_->touching;
}

std::size_t Assembler::touching_pair_count() const
{
    return cache_->touching;
}

namespace
{

enum class Remainder
{
    Full,    // far pair: the whole kernel
    Static,  // G - 1/(4 pi R)
    Static2  // G - 1/(4 pi R) + k^2 R/(8 pi)
};

void regular_part(const TriGeom& go, const TriGeom& gi, double k, Remainder mode, bool grads,
                  PairSums<Complex>& out)
{
    Accumulator<Complex> acc;
    const Vec3 dc = go.c - gi.c;
    for (std::size_t p = 0; p < go.rel.size(); ++p)
    {
        const Vec3& u = go.rel[p];
        for (std::size_t q = 0; q < gi.rel.size(); ++q)
        {
            const Vec3& v = gi.rel[q];
            const Vec3 d = dc + u - v;
            const double R = d.norm();
            const double w = go.w[p] * gi.w[q];
            Complex g, dg;
            switch (mode)
            {
            case Remainder::Full:
            {
                const double inv = inv4pi / R;
                const Complex e(std::cos(k * R), -std::sin(k * R));
                g = e * inv;
                dg = Complex(-1.0 / R, -k) * g / R;
                break;
            }
            case Remainder::Static:
                g = green_minus_static(k, R);
                dg = green_minus_static_grad(k, R);
                break;
            case Remainder::Static2:
                g = green_minus_static2(k, R);
                dg = green_minus_static2_grad(k, R);
                break;
            }
            acc.add_value(w * g, u, v);
            if (grads)
                acc.add_gradient(w * dg, u, v, d);
        }
    }
    acc.finish(go.nu, gi.nu, true, grads, out);
}

void add_static(const PairSums<double>& s, double scale, bool grads, PairSums<Complex>& out)
{
    out.phi += scale * s.phi;
    for (std::size_t i = 0; i < 9; ++i)
    {
        out.a[i] += scale * s.a[i];
        if (grads)
            out.b[i] += scale * s.b[i];
    }
}

} // namespace

void Assembler::assemble(double k, SurfaceRole test, SurfaceRole source, CMatrix* L, CMatrix* K) const
{
    if (!(k > 0.0) || !std::isfinite(k))
        throw DomainError("assembly needs a positive wavenumber");
    const auto& ftest = basis_.functions(test);
    const auto& fsrc = basis_.functions(source);
    const auto rows = static_cast<Idx>(ftest.size());
    const auto cols = static_cast<Idx>(fsrc.size());
    if (L)
        L->setZero(rows, cols);
    if (K)
        K->setZero(rows, cols);
    if (rows == 0 || cols == 0 || (!L && !K))
        return;

    std::vector<int> sources;
    for (int s : mesh_.triangles_with(source))
        if (!basis_.halves(s).empty())
            sources.push_back(s);

    const auto& geom = cache_->geom;
    const auto& pairs = cache_->pairs;
    const int threads = options_.threads > 0 ? options_.threads : omp_get_max_threads();
    const auto ntri = mesh_.triangles().size();
    const Complex jk = j_unit * k;
    const Complex jk_inv = j_unit / k;

    for (const auto& colour : cache_->colours.at(test))
    {
        std::string failure;
#pragma omp parallel num_threads(threads)
        {
            std::vector<int> near(ntri, -1);
#pragma omp for schedule(dynamic, 2)
            for (std::size_t ci = 0; ci < colour.size(); ++ci)
            {
                const int t = colour[ci];
                try
                {
                    for (const auto& [other, idx] : cache_->neighbours[static_cast<std::size_t>(t)])
                        near[static_cast<std::size_t>(other)] = idx;

                    for (int s : sources)
                    {
                        const bool flip = s < t;
                        const int outer = flip ? s : t;
                        const int inner = flip ? t : s;
                        const TriGeom& go = geom[static_cast<std::size_t>(outer)];
                        const TriGeom& gi = geom[static_cast<std::size_t>(inner)];
                        const int idx = near[static_cast<std::size_t>(s)];
                        const StaticPair* sp = idx >= 0 ? &pairs[static_cast<std::size_t>(idx)] : nullptr;
                        const bool grads = K && !(sp ? sp->coplanar : coplanar(go, gi));

                        PairSums<Complex> ps;
                        if (!sp)
                        {
                            regular_part(go, gi, k, Remainder::Full, grads, ps);
                        }
                        else if (sp->shared == 0)
                        {
                            regular_part(go, gi, k, Remainder::Static, grads, ps);
                            add_static(sp->inv, 1.0, grads, ps);
                        }
                        else
                        {
                            regular_part(go, gi, k, Remainder::Static2, grads, ps);
                            add_static(sp->inv, 1.0, grads, ps);
                            add_static(sp->lin, -0.5 * k * k, grads, ps);
                        }

                        const double at = mesh_.triangle(t).area;
                        const double as = mesh_.triangle(s).area;
                        for (const RwgHalf& hp : basis_.halves(t))
                        {
                            const double cp = hp.sign * ftest[static_cast<std::size_t>(hp.function)].length / (2.0 * at);
                            for (const RwgHalf& hq : basis_.halves(s))
                            {
                                const double cq =
                                    hq.sign * fsrc[static_cast<std::size_t>(hq.function)].length / (2.0 * as);
                                const auto ij = static_cast<std::size_t>(flip ? 3 * hq.local + hp.local
                                                                                : 3 * hp.local + hq.local);
                                const double cc = cp * cq;
                                if (L)
                                    (*L)(hp.function, hq.function) += cc * (jk * ps.a[ij] - 4.0 * jk_inv * ps.phi);
                                if (grads)
                                    (*K)(hp.function, hq.function) -= cc * ps.b[ij];
                            }
                        }
                    }

                    for (const auto& [other, idx] : cache_->neighbours[static_cast<std::size_t>(t)])
                        near[static_cast<std::size_t>(other)] = -1;
                }
                catch (const std::exception& e)
                {
#pragma omp critical(mtfcma_assembly_error)
                    if (failure.empty())
                        failure = "test triangle " + std::to_string(t) + ": " + e.what();
                }
            }
        }
        if (!failure.empty())
            throw AssemblyError(failure);
    }

    auto check = [](const CMatrix* m, const char* name) {
        if (m && !m->allFinite())
            throw AssemblyError(std::string(name) + " block has non-finite entries");
    };
    check(L, "L");
    check(K, "K");
}

OperatorBlock assemble_L(const Assembler& assembler, const Medium& medium, int m, SurfaceRole a, SurfaceRole b,
                         double freq_hz)
{
    medium.validate();
    OperatorBlock block;
    block.kind = OperatorKind::L;
    block.medium = m;
    block.test = a;
    block.source = b;
    assembler.assemble(medium.wavenumber(freq_hz), a, b, &block.matrix, nullptr);
    return block;
}

OperatorBlock assemble_K(const Assembler& assembler, const Medium& medium, int m, SurfaceRole a, SurfaceRole b,
                         double freq_hz)
{
    medium.validate();
    OperatorBlock block;
    block.kind = OperatorKind::K;
    block.medium = m;
    block.test = a;
    block.source = b;
    assembler.assemble(medium.wavenumber(freq_hz), a, b, nullptr, &block.matrix);
    return block;
}

// ---------------------------------------------------------------------------

OperatorBlock assemble_S(const TaggedMesh& mesh, const RwgBasis& basis, SurfaceRole a, SurfaceRole b,
                         const CoincidenceMap& coincidence)
{
    OperatorBlock block;
    block.kind = OperatorKind::S;
    block.medium = -1;
    block.test = a;
    block.source = b;
    const auto& fa = basis.functions(a);
    const auto& fb = basis.functions(b);
    block.matrix.setZero(static_cast<Idx>(fa.size()), static_cast<Idx>(fb.size()));

    // (test triangle, source triangle, triangle providing the normal)
    std::vector<std::array<int, 3>> overlaps;
    if (a == b)
    {
        for (int t : mesh.triangles_with(a))
            overlaps.push_back({t, t, t});
    }
    else if (a == SurfaceRole::Dielectric || b == SurfaceRole::Dielectric)
    {
        const SurfaceRole pec = a == SurfaceRole::Dielectric ? b : a;
        for (const auto& pair : coincidence.pairs)
        {
            if (mesh.triangle(pair.pec).role != pec)
                continue;
            if (a == SurfaceRole::Dielectric)
                overlaps.push_back({pair.dielectric, pair.pec, pair.dielectric});
            else
                overlaps.push_back({pair.pec, pair.dielectric, pair.dielectric});
        }
    }

    for (const auto& [ta, tb, tn] : overlaps)
    {
        const Vec3& n = mesh.triangle(tn).normal;
        const double area = mesh.triangle(ta).area;
        const Vec3 c = mesh.centroid(ta);
        for (const RwgHalf& hp : basis.halves(ta))
        {
            const Vec3& vp = mesh.corner(ta, hp.local);
            const double cp = hp.sign * fa[static_cast<std::size_t>(hp.function)].length / (2.0 * area);
            for (const RwgHalf& hq : basis.halves(tb))
            {
                const Vec3& vq = mesh.corner(tb, hq.local);
                const double cq = hq.sign * fb[static_cast<std::size_t>(hq.function)].length /
                                  (2.0 * mesh.triangle(tb).area);
                // int (r - vp) x (r - vq) dA = A (c - vp) x (vp - vq)
                block.matrix(hp.function, hq.function) += cp * cq * area * n.dot((c - vp).cross(vp - vq));
            }
        }
    }
    return block;
}

// ---------------------------------------------------------------------------

void PlaneWave::validate() const
{
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        throw DomainError("plane-wave direction must be a unit vector");
    if (std::abs(polarization.norm() - 1.0) > 1e-9)
        throw DomainError("plane-wave polarization must be a unit vector");
    if (std::abs(direction.dot(polarization)) >= 1e-12)
        throw DomainError("plane-wave polarization is not orthogonal to the propagation direction");
}

CVec3 PlaneWave::e_field(double k, const Vec3& r) const
{
    const Complex phase = std::polar(1.0, -k * direction.dot(r));
    return (amplitude * phase) * polarization.cast<Complex>();
}

CVec3 PlaneWave::h_field(double k, const Vec3& r) const
{
    const Complex phase = std::polar(1.0, -k * direction.dot(r));
    return (amplitude * phase / eta0) * direction.cross(polarization).cast<Complex>();
}

const CVector& Excitation::tested_e(SurfaceRole role) const
{
    return e.at(role);
}

const CVector& Excitation::tested_h(SurfaceRole role) const
{
    return h.at(role);
}

Excitation no_excitation(const RwgBasis& basis, double freq_hz)
{
    Excitation exc;
    exc.none = true;
    exc.frequency = freq_hz;
    for (SurfaceRole role : {SurfaceRole::Radiator, SurfaceRole::Ground, SurfaceRole::Dielectric})
    {
        exc.e[role] = CVector::Zero(static_cast<Idx>(basis.count(role)));
        exc.h[role] = CVector::Zero(static_cast<Idx>(basis.count(role)));
    }
    return exc;
}

Excitation assemble_excitation(const TaggedMesh& mesh, const RwgBasis& basis, const PlaneWave& wave,
                               double freq_hz, int degree)
{
    wave.validate();
    Excitation exc = no_excitation(basis, freq_hz);
    exc.none = false;
    exc.wave = wave;
    const double k = Medium{}.wavenumber(freq_hz);
    const QuadratureRule& rule = triangle_rule(degree);
    for (SurfaceRole role : {SurfaceRole::Radiator, SurfaceRole::Ground, SurfaceRole::Dielectric})
    {
        const auto& fns = basis.functions(role);
        CVector& e = exc.e[role];
        CVector& h = exc.h[role];
        for (int t : mesh.triangles_with(role))
        {
            const auto& halves = basis.halves(t);
            if (halves.empty())
                continue;
            const double area = mesh.triangle(t).area;
            for (std::size_t q = 0; q < rule.size(); ++q)
            {
                const auto& l = rule.points[q];
                const Vec3 x = l[0] * mesh.corner(t, 0) + l[1] * mesh.corner(t, 1) + l[2] * mesh.corner(t, 2);
                const CVec3 ei = wave.e_field(k, x);
                const CVec3 hi = wave.h_field(k, x);
                for (const RwgHalf& hp : halves)
                {
                    const double c = hp.sign * fns[static_cast<std::size_t>(hp.function)].length / (2.0 * area);
                    const Vec3 f = c * (x - mesh.corner(t, hp.local));
                    const double w = rule.weights[q] * area;
                    e(hp.function) += w * f.cast<Complex>().dot(ei);
                    h(hp.function) += w * f.cast<Complex>().dot(hi);
                }
            }
        }
    }
    return exc;
}

// ---------------------------------------------------------------------------

namespace
{

constexpr char block_magic[8] = {'M', 'T', 'F', 'B', 'L', 'K', '0', '1'};

template <class T>
void put_le(std::ostream& out, T value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in)
{
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

} // namespace

void dump_block(const CMatrix& matrix, OperatorKind kind, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write block dump " + path.string());
    out.write(block_magic, 8);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.cols()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
    put_le<std::uint32_t>(out, 0u);
    for (Idx r = 0; r < matrix.rows(); ++r)
        for (Idx c = 0; c < matrix.cols(); ++c)
        {
            put_le<double>(out, matrix(r, c).real());
            put_le<double>(out, matrix(r, c).imag());
        }
    if (!out)
        throw IoError("write failed for " + path.string());
}

CMatrix read_block(const std::filesystem::path& path, OperatorKind* kind)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open block dump " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, block_magic, 8) != 0)
        throw ParseError(path.string() + ": not a block dump");
    const auto rows = get_le<std::uint64_t>(in);
    const auto cols = get_le<std::uint64_t>(in);
    const auto k = get_le<std::uint32_t>(in);
    get_le<std::uint32_t>(in);
    if (!in)
        throw ParseError(path.string() + ": truncated header");
    if (kind)
        *kind = static_cast<OperatorKind>(k);
    CMatrix m(static_cast<Idx>(rows), static_cast<Idx>(cols));
    for (Idx r = 0; r < m.rows(); ++r)
        for (Idx c = 0; c < m.cols(); ++c)
        {
            const double re = get_le<double>(in);
            const double im = get_le<double>(in);
            m(r, c) = Complex(re, im);
        }
    if (!in)
        throw ParseError(path.string() + ": truncated data");
    return m;
}

} // namespace mtfcma
