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

#include "mtfcma/em_core.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

void Medium::validate() const
{
    if (!(std::isfinite(eps_r) && eps_r > 0.0 && std::isfinite(mu_r) && mu_r > 0.0))
        throw DomainError("medium parameters must be finite and positive (eps_r=" + std::to_string(eps_r) +
                          ", mu_r=" + std::to_string(mu_r) + ")");
}

double Medium::wavenumber(double freq_hz) const
{
    return 2.0 * pi * freq_hz * std::sqrt(eps_r * mu_r) / c0;
}

double Medium::impedance() const
{
    return eta0 * std::sqrt(mu_r / eps_r);
}

// ---------------------------------------------------------------------------

namespace
{

double checked_distance(const Vec3& r, const Vec3& r_src)
{
    const double R = (r - r_src).norm();
    if (!(R >= min_separation))
        throw DomainError("Green function evaluated at separation " + std::to_string(R) + " m");
    return R;
}

// k^3 * sum_{n >= n0} (-j)^n (n-1) x^(n-3) / n!, for x = kR small.
Complex derivative_series(double k, double x, int n0)
{
    Complex sum = 0.0;
    Complex jn = 1.0;  // (-j)^n
    double fact = 1.0;
    for (int n = 1; n < n0; ++n)
    {
        jn *= -j_unit;
        fact *= n;
    }
    double xp = std::pow(x, n0 - 3);
    for (int n = n0; n < n0 + 40; ++n)
    {
        jn *= -j_unit;
        fact *= n;
        const Complex term = jn * static_cast<double>(n - 1) * xp / fact;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum))
            break;
        xp *= x;
    }
    return k * k * k * sum;
}

constexpr double series_limit = 0.5;

} // namespace

Complex green(double k, const Vec3& r, const Vec3& r_src)
{
    const double R = checked_distance(r, r_src);
    return std::polar(1.0 / (4.0 * pi * R), -k * R);
}

CVec3 grad_green(double k, const Vec3& r, const Vec3& r_src)
{
    const double R = checked_distance(r, r_src);
    const Complex g = std::polar(1.0 / (4.0 * pi * R), -k * R);
    const Complex radial = (-j_unit * k - 1.0 / R) * g / R;
    return radial * (r - r_src).cast<Complex>();
}

Complex green_minus_static(double k, double R)
{
    if (R <= 0.0)
        return -j_unit * k / (4.0 * pi);
    const double x = k * R;
    const double s = std::sin(0.5 * x);
    return Complex(-2.0 * s * s, -std::sin(x)) / (4.0 * pi * R);
}

Complex green_minus_static_grad(double k, double R)
{
    if (R <= 0.0)
        return 0.0;
    const double x = k * R;
    if (x < series_limit)
        return derivative_series(k, x, 2) / (4.0 * pi);
    const Complex e = std::polar(1.0, -x);
    const Complex h = (-j_unit * x * e - e + 1.0) / (R * R);
    return h / (4.0 * pi * R);
}

Complex green_minus_static2(double k, double R)
{
    const double x = k * R;
    if (x < series_limit)
    {
        // k * sum_{n>=1, n!=2} (-j)^n x^(n-1) / n!
        Complex sum = -j_unit;
        Complex jn = -1.0;  // (-j)^2
        double fact = 2.0, xp = x;
        for (int n = 3; n < 40; ++n)
        {
            jn *= -j_unit;
            fact *= n;
            xp *= x;
            const Complex term = jn * xp / fact;
            sum += term;
            if (std::abs(term) < 1e-18)
                break;
        }
        return k * sum / (4.0 * pi);
    }
    const double s = std::sin(0.5 * x);
    return (Complex(-2.0 * s * s, -std::sin(x)) / R + 0.5 * k * x) / (4.0 * pi);
}

Complex green_minus_static2_grad(double k, double R)
{
    const double x = k * R;
    if (x < series_limit)
        return derivative_series(k, x, 3) / (4.0 * pi);
    const Complex e = std::polar(1.0, -x);
    const Complex h = (-j_unit * x * e - e + 1.0) / (R * R) + 0.5 * k * k;
    return h / (4.0 * pi * R);
}

// ---------------------------------------------------------------------------
// Triangle rules (Dunavant)
// ---------------------------------------------------------------------------

namespace
{

struct RuleBuilder
{
    QuadratureRule rule;

    RuleBuilder& centroid(double w)
    {
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        rule.weights.push_back(w);
        return *this;
    }
    // (a, a, 1 - 2a) and its rotations
    RuleBuilder& orbit3(double a, double w)
    {
        const double b = 1.0 - 2.0 * a;
        rule.points.push_back({b, a, a});
        rule.points.push_back({a, b, a});
        rule.points.push_back({a, a, b});
        rule.weights.insert(rule.weights.end(), 3, w);
        return *this;
    }
    // all permutations of (a, b, 1 - a - b)
    RuleBuilder& orbit6(double a, double b, double w)
    {
        const double c = 1.0 - a - b;
        for (const auto& p : {std::array<double, 3>{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}})
            rule.points.push_back(p);
        rule.weights.insert(rule.weights.end(), 6, w);
        return *this;
    }
};

std::vector<QuadratureRule> make_rules()
{
    std::vector<QuadratureRule> rules;
    RuleBuilder r1;
    r1.rule.degree = 1;
    r1.centroid(1.0);
    rules.push_back(r1.rule);

    RuleBuilder r2;
    r2.rule.degree = 2;
    r2.orbit3(1.0 / 6.0, 1.0 / 3.0);
    rules.push_back(r2.rule);

    RuleBuilder r4;
    r4.rule.degree = 4;
    r4.orbit3(0.445948490915965, 0.223381589678011).orbit3(0.091576213509771, 0.109951743655322);
    rules.push_back(r4.rule);

    RuleBuilder r5;
    r5.rule.degree = 5;
    r5.centroid(0.225)
        .orbit3(0.470142064105115, 0.132394152788506)
        .orbit3(0.101286507323456, 0.125939180544827);
    rules.push_back(r5.rule);

    RuleBuilder r6;
    r6.rule.degree = 6;
    r6.orbit3(0.249286745170910, 0.116786275726379)
        .orbit3(0.063089014491502, 0.050844906370207)
        .orbit6(0.053145049844817, 0.310352451033784, 0.082851075618374);
    rules.push_back(r6.rule);

    RuleBuilder r8;
    r8.rule.degree = 8;
    r8.centroid(0.144315607677787)
        .orbit3(0.459292588292723, 0.095091634267285)
        .orbit3(0.170569307751760, 0.103217370534718)
        .orbit3(0.050547228317031, 0.032458497623198)
        .orbit6(0.008394777409958, 0.263112829634638, 0.027230314174435);
    rules.push_back(r8.rule);

    // tabulated weights carry 15 digits; renormalise the sum exactly
    for (auto& q : rules)
    {
        double sum = 0.0;
        for (double w : q.weights)
            sum += w;
        for (double& w : q.weights)
            w /= sum;
    }
    return rules;
}

} // namespace

const QuadratureRule& triangle_rule(int degree)
{
    static const std::vector<QuadratureRule> rules = make_rules();
    if (degree < 1 || degree > 8)
        throw DomainError("no triangle rule of degree " + std::to_string(degree) + " (1..8 available)");
    for (const auto& q : rules)
        if (q.degree >= degree)
            return q;
    return rules.back();
}

GaussRule gauss_legendre(int n)
{
    if (n < 1)
        throw DomainError("Gauss-Legendre rule needs at least one point");
    GaussRule g;
    g.x.resize(static_cast<std::size_t>(n));
    g.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1.0, p1 = z;
            for (int m = 2; m <= n; ++m)
            {
                const double p2 = ((2.0 * m - 1.0) * z * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = z;
        for (int m = 2; m <= n; ++m)
        {
            const double p2 = ((2.0 * m - 1.0) * z * p1 - (m - 1.0) * p0) / m;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const auto idx = static_cast<std::size_t>(n - 1 - i);
        g.x[idx] = 0.5 * (1.0 + z);
        g.w[idx] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Sauter-Schwab rules for touching triangles
// ---------------------------------------------------------------------------

namespace
{

// Reference triangle {0 <= x2 <= x1 <= 1}; mapped to barycentric coordinates
// (1 - x1, x1 - x2, x2) so vertex 0 sits at the origin and vertex 1 at (1, 0).
std::array<double, 3> bary(double x1, double x2)
{
    return {1.0 - x1, x1 - x2, x2};
}

PairRule build_sauter_schwab(int shared, int order)
{
    PairRule rule;
    rule.shared = shared;
    const GaussRule g = gauss_legendre(order);
    auto add = [&rule](double a1, double a2, double b1, double b2, double w) {
        rule.x.push_back(bary(a1, a2));
        rule.y.push_back(bary(b1, b2));
        rule.w.push_back(w);
    };
    const auto n = static_cast<std::size_t>(order);
    for (std::size_t ia = 0; ia < n; ++ia)
        for (std::size_t i3 = 0; i3 < n; ++i3)
            for (std::size_t i2 = 0; i2 < n; ++i2)
                for (std::size_t i1 = 0; i1 < n; ++i1)
                {
                    const double xi = g.x[ia], e1 = g.x[i1], e2 = g.x[i2], e3 = g.x[i3];
                    const double w0 = g.w[ia] * g.w[i1] * g.w[i2] * g.w[i3];
                    const double xi3 = xi * xi * xi;
                    if (shared == 3)
                    {
                        const double w = w0 * xi3 * e1 * e1 * e2;
                        add(xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), w);
                        add(xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), w);
                        add(xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), w);
                        add(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), w);
                        add(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), w);
                        add(xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), w);
                    }
                    else if (shared == 2)
                    {
                        const double w = w0 * xi3 * e1 * e1 * e2;
                        add(xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), w0 * xi3 * e1 * e1);
                        add(xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), w);
                        add(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, w);
                        add(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, w);
                        add(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, w);
                    }
                    else if (shared == 1)
                    {
                        const double w = w0 * xi3 * e2;
                        add(xi, xi * e1, xi * e2, xi * e2 * e3, w);
                        add(xi * e2, xi * e2 * e3, xi, xi * e1, w);
                    }
                    else
                    {
                        throw DomainError("Sauter-Schwab rule needs 1, 2 or 3 shared vertices");
                    }
                }
    return rule;
}

} // namespace

const PairRule& sauter_schwab_rule(int shared, int order)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<PairRule>> cache;
    if (order < 1 || order > 32)
        throw DomainError("Sauter-Schwab order must lie in 1..32");
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{shared, order}];
    if (!slot)
        slot = std::make_unique<PairRule>(build_sauter_schwab(shared, order));
    return *slot;
}

// ---------------------------------------------------------------------------
// Analytic potentials of a flat triangle
// ---------------------------------------------------------------------------

PanelPotentials panel_potentials(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& r)
{
    const Vec3 cr = (b - a).cross(c - a);
    const double twice_area = cr.norm();
    const double size = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    if (!(twice_area > 1e-14 * size * size) || !(size > 0.0))
        throw DegenerateTriangleError("panel integral over a degenerate triangle");
    const Vec3 n = cr / twice_area;

    double d = n.dot(r - a);
    if (std::abs(d) < 1e-12 * size)
        d = 0.0;
    const double ad = std::abs(d);
    const Vec3 rho = r - d * n;
    const double tiny = 1e-14 * size;

    PanelPotentials out;
    out.projection = rho;
    const Vec3* p[3] = {&a, &b, &c};
    double beta_sum = 0.0;
    for (int i = 0; i < 3; ++i)
    {
        const Vec3& p0 = *p[i];
        const Vec3& p1 = *p[(i + 1) % 3];
        const double len = (p1 - p0).norm();
        const Vec3 l = (p1 - p0) / len;
        const Vec3 u = l.cross(n);
        const double sm = (p0 - rho).dot(l);
        const double sp = (p1 - rho).dot(l);
        const double t0 = (p0 - rho).dot(u);
        double r02 = t0 * t0 + d * d;
        if (r02 < tiny * tiny)
            r02 = tiny * tiny;
        const double rp = std::sqrt(sp * sp + r02);
        const double rm = std::sqrt(sm * sm + r02);

        // ln((R+ + s+)/(R- + s-)) without cancellation for negative s
        double f;
        if (sm >= 0.0)
            f = std::log((rp + sp) / (rm + sm));
        else if (sp <= 0.0)
            f = std::log((rm - sm) / (rp - sp));
        else
            f = std::log((rp + sp) * (rm - sm) / r02);

        double beta = 0.0;
        if (std::abs(t0) > tiny)
            beta = std::atan(t0 * sp / (r02 + ad * rp)) - std::atan(t0 * sm / (r02 + ad * rm));

        out.scalar += t0 * f - ad * beta;
        out.vector += 0.5 * (r02 * f + sp * rp - sm * rm) * u;
        out.gradient -= f * u;
        beta_sum += beta;
    }
    if (d != 0.0)
        out.gradient -= (d > 0.0 ? 1.0 : -1.0) * beta_sum * n;
    return out;
}

double singular_panel_integral(const std::array<Vec3, 3>& tri, const Vec3& obs)
{
    return panel_potentials(tri[0], tri[1], tri[2], obs).scalar;
}

Vec3 singular_panel_gradient(const std::array<Vec3, 3>& tri, const Vec3& obs)
{
    return panel_potentials(tri[0], tri[1], tri[2], obs).gradient;
}

} // namespace mtfcma
