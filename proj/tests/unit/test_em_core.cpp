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
#include <random>

#include "mtfcma/em_core.hpp"
#include "mtfcma/errors.hpp"
#include "support/oracles.hpp"

using namespace mtfcma;

namespace
{

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

// mean of b0^a b1^b b2^c over the triangle
double monomial_mean(int a, int b, int c)
{
    return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

// (1/R) d/dR of the series sum_{n >= first} (-jk)^n R^(n-1) / (4 pi n!),
// summed in long double; closed form once kR is large.
Complex radial_over_r(double k, double R, int first)
{
    if (k * R > 2.0)
    {
        const Complex e = std::exp(-j_unit * k * R);
        Complex d = (-j_unit * k * R * e - (e - 1.0)) / (4.0 * pi * R * R);
        if (first == 3)
            d += k * k / (8.0 * pi);
        return d / R;
    }
    std::complex<long double> sum = 0.0L, term = 1.0L;  // term = (-jk)^n / n!
    const std::complex<long double> mjk(0.0L, -static_cast<long double>(k));
    for (int n = 1; n < 60; ++n)
    {
        term *= mjk / static_cast<long double>(n);
        if (n >= first)
            sum += term * static_cast<long double>(n - 1) * std::pow(static_cast<long double>(R), n - 3);
    }
    return Complex(static_cast<double>(sum.real()), static_cast<double>(sum.imag())) / (4.0 * pi);
}

Vec3 at(const oracle::Tri& t, const std::array<double, 3>& b)
{
    return b[0] * t[0] + b[1] * t[1] + b[2] * t[2];
}

} // namespace

TEST_CASE("medium")
{
    const Medium m{4.0, 1.0};
    CHECK(m.wavenumber(1e9) == doctest::Approx(2.0 * pi * 1e9 * 2.0 / c0).epsilon(1e-14));
    CHECK(m.impedance() == doctest::Approx(eta0 / 2.0).epsilon(1e-14));
    CHECK_THROWS_AS((Medium{0.0, 1.0}).validate(), DomainError);
    CHECK_THROWS_AS((Medium{2.0, -1.0}).validate(), DomainError);
    CHECK_THROWS_AS((Medium{std::nan(""), 1.0}).validate(), DomainError);
    CHECK(eta0 == doctest::Approx(376.730313).epsilon(1e-8));
}

TEST_CASE("green function")
{
    const Vec3 o = Vec3::Zero(), z = Vec3::UnitZ();
    const Complex g0 = green(0.0, z, o);
    CHECK(g0.real() == doctest::Approx(0.0795774715459477).epsilon(1e-14));
    CHECK(g0.imag() == 0.0);
    const Complex g1 = green(2.0 * pi, z, o);
    CHECK(std::abs(g1 - 1.0 / (4.0 * pi)) < 1e-15);
    const Vec3 a(0.1, -0.7, 0.3), b(-0.4, 0.2, 0.9);
    CHECK(std::abs(green(3.3, a, b) - green(3.3, b, a)) == 0.0);
    CHECK_THROWS_AS(green(1.0, a, a + Vec3(1e-15, 0, 0)), DomainError);
    CHECK_THROWS_AS(grad_green(1.0, a, a), DomainError);
}

TEST_CASE("green gradient")
{
    const CVec3 s = grad_green(0.0, Vec3::UnitZ(), Vec3::Zero());
    CHECK(std::abs(s.z() + 1.0 / (4.0 * pi)) < 1e-15);
    CHECK(std::abs(s.x()) + std::abs(s.y()) == 0.0);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Vec3 r(u(rng), u(rng), u(rng)), q(u(rng), u(rng), u(rng));
        const double k = 5.0 * std::abs(u(rng));
        const CVec3 g = grad_green(k, r, q);
        CHECK((g + grad_green(k, q, r)).norm() < 1e-15 * g.norm());
        const double h = 1e-6;
        CVec3 fd;
        for (int c = 0; c < 3; ++c)
        {
            Vec3 e = Vec3::Zero();
            e(c) = h;
            fd(c) = (green(k, r + e, q) - green(k, r - e, q)) / (2.0 * h);
        }
        CHECK((fd - g).norm() < 1e-6 * g.norm());
    }
}

TEST_CASE("singularity-extracted kernels")
{
    for (double k : {0.5, 3.0, 20.0})
    {
        const Complex lim = -j_unit * k / (4.0 * pi);
        CHECK(std::abs(green_minus_static(k, 1e-8) - lim) < 1e-6 * std::abs(lim));
        CHECK(std::abs(green_minus_static(k, 0.0) - lim) < 1e-15);
        for (double R : {1e-3, 0.05, 0.4, 1.7})
        {
            const Complex ref = std::exp(-j_unit * k * R) / (4.0 * pi * R) - 1.0 / (4.0 * pi * R);
            CHECK(std::abs(green_minus_static(k, R) - ref) < 1e-12 * std::abs(ref) + 1e-14);
            const Complex ref2 = ref + k * k * R / (8.0 * pi);
            CHECK(std::abs(green_minus_static2(k, R) - ref2) < 1e-9 * std::abs(ref) + 1e-14);
            CHECK(std::abs(green_minus_static_grad(k, R) - radial_over_r(k, R, 2)) <
                  1e-10 * std::abs(radial_over_r(k, R, 2)));
            CHECK(std::abs(green_minus_static2_grad(k, R) - radial_over_r(k, R, 3)) <
                  1e-10 * std::abs(radial_over_r(k, R, 3)));
        }
        CHECK(std::abs(green_minus_static2_grad(k, 0.0) - j_unit * k * k * k / (12.0 * pi)) < 1e-12 * k * k * k);
    }
}

TEST_CASE("triangle rules are exact up to their degree")
{
    for (int degree = 1; degree <= 8; ++degree)
    {
        const QuadratureRule& q = triangle_rule(degree);
        CHECK(q.degree >= degree);
        double wsum = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
        {
            wsum += q.weights[i];
            for (double b : q.points[i])
                CHECK(b > 0.0);
            CHECK(q.points[i][0] + q.points[i][1] + q.points[i][2] == doctest::Approx(1.0).epsilon(1e-15));
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b)
                for (int c = 0; a + b + c <= degree; ++c)
                {
                    double s = 0.0;
                    for (std::size_t i = 0; i < q.size(); ++i)
                        s += q.weights[i] * std::pow(q.points[i][0], a) * std::pow(q.points[i][1], b) *
                             std::pow(q.points[i][2], c);
                    CHECK(std::abs(s - monomial_mean(a, b, c)) < 1e-12);
                }
    }
    CHECK(triangle_rule(4).size() == 6);
}

TEST_CASE("gauss-legendre on [0,1]")
{
    for (int n : {1, 2, 5, 8, 12})
    {
        const GaussRule g = gauss_legendre(n);
        for (int p = 0; p < 2 * n; ++p)
        {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += g.w[static_cast<std::size_t>(i)] * std::pow(g.x[static_cast<std::size_t>(i)], p);
            CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("panel integrals against polar quadrature")
{
    const double a = 0.3;
    const oracle::Tri eq{Vec3(0, 0, 0), Vec3(a, 0, 0), Vec3(a / 2, a * std::sqrt(3.0) / 2, 0)};
    const Vec3 cen = (eq[0] + eq[1] + eq[2]) / 3.0;

    SUBCASE("centroid of an equilateral panel")
    {
        const double ref = oracle::inv_r(eq, cen);
        CHECK(std::abs(singular_panel_integral(eq, cen) - ref) < 1e-10 * ref);
        // closed form for the equilateral centroid: sqrt(3) a ln(2 + sqrt 3) ... check via oracle only
        CHECK(singular_panel_gradient(eq, cen).norm() < 1e-10);
    }
    SUBCASE("vertex and edge points")
    {
        for (const Vec3& r : {eq[0], eq[2], Vec3(0.5 * (eq[0] + eq[1])), Vec3(0.3 * eq[1] + 0.7 * eq[2])})
        {
            const double ref = oracle::inv_r(eq, r);
            CHECK(std::abs(singular_panel_integral(eq, r) - ref) < 1e-10 * ref);
        }
    }
    SUBCASE("near and off-plane points")
    {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(-0.2, 0.5);
        const oracle::Tri t{Vec3(0.01, 0.02, -0.03), Vec3(0.21, -0.05, 0.04), Vec3(0.05, 0.18, 0.1)};
        for (int trial = 0; trial < 25; ++trial)
        {
            const Vec3 r(u(rng), u(rng), u(rng));
            const double ref = oracle::inv_r(t, r);
            CHECK(std::abs(singular_panel_integral(t, r) - ref) < 1e-10 * ref);
            const Vec3 g = singular_panel_gradient(t, r), gref = oracle::grad_inv_r(t, r);
            CHECK((g - gref).norm() < 1e-9 * gref.norm());
        }
        // in-plane points outside and inside: principal value with zero normal part
        const Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]).normalized();
        for (const Vec3& r : {Vec3(0.3 * t[0] + 0.3 * t[1] + 0.4 * t[2]), Vec3(1.4 * t[1] - 0.4 * t[0])})
        {
            const Vec3 g = singular_panel_gradient(t, r), gref = oracle::grad_inv_r(t, r);
            CHECK((g - gref).norm() < 1e-9 * gref.norm());
            CHECK(std::abs(g.dot(n)) < 1e-12 * gref.norm());
        }
    }
    SUBCASE("far point")
    {
        const Vec3 r = cen + Vec3(50.0, 20.0, 30.0);
        const double area = 0.5 * (eq[1] - eq[0]).cross(eq[2] - eq[0]).norm();
        CHECK(singular_panel_integral(eq, r) == doctest::Approx(area / (r - cen).norm()).epsilon(1e-4));
    }
    SUBCASE("degenerate panel")
    {
        const oracle::Tri bad{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
        CHECK_THROWS_AS(singular_panel_integral(bad, Vec3(0, 1, 0)), DegenerateTriangleError);
    }
}

TEST_CASE("sauter-schwab rules against reference double integrals")
{
    const Vec3 s0(0, 0, 0), s1(0.2, 0, 0), pa(0.07, 0.15, 0), pb(0.12, -0.13, 0.0), pc(0.05, -0.17, 0.0), pf(-0.15, -0.06, 0.0),
        pd(0.12, -0.13, 0.05), pe(-0.1, 0.04, 0.11);
    struct Case
    {
        int shared;
        int order;
        oracle::Tri t1, t2;
        double tol;
    };
    // coplanar pairs have a cheap edge-integral reference; the tilted pair uses the adaptive one
    const Case cases[] = {{3, 12, {s0, s1, pa}, {s0, s1, pa}, 1e-9},
                          {2, 12, {s0, s1, pa}, {s0, s1, pb}, 1e-9},
                          {1, 8, {s0, s1, pa}, {s0, pc, pf}, 1e-9},
                          {1, 12, {s0, s1, pa}, {s0, pd, pe}, 1e-8}};
    for (const auto& c : cases)
    {
        const PairRule& rule = sauter_schwab_rule(c.shared, c.order);
        double wsum = 0.0;
        for (double w : rule.w)
            wsum += w;
        CHECK(wsum == doctest::Approx(0.25).epsilon(1e-13));

        const double j1 = (c.t1[1] - c.t1[0]).cross(c.t1[2] - c.t1[0]).norm();
        const double j2 = (c.t2[1] - c.t2[0]).cross(c.t2[2] - c.t2[0]).norm();
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i)
            s += rule.w[i] / (at(c.t1, rule.x[i]) - at(c.t2, rule.y[i])).norm();
        s *= j1 * j2;
        const double ref = c.tol < 1e-8 ? oracle::double_inv_r_coplanar(c.t1, c.t2)
                                        : oracle::double_inv_r(c.t1, {1, 1, 1}, c.t2, {1, 1, 1}, 1e-10);
        INFO("shared = " << c.shared);
        CHECK(std::abs(s - ref) < c.tol * ref);
    }
}
