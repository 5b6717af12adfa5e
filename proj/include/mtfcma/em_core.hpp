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

#pragma once

#include <array>
#include <vector>

#include "mtfcma/common.hpp"

namespace mtfcma
{

// ---------------------------------------------------------------------------
// Media
// ---------------------------------------------------------------------------

/// Homogeneous lossless medium, relative to vacuum.
struct Medium
{
    double eps_r = 1.0;
    double mu_r = 1.0;

    /// Throws DomainError unless both parameters are finite and positive.
    void validate() const;

    double wavenumber(double freq_hz) const;
    double impedance() const;
};

// ---------------------------------------------------------------------------
// Green function e^{-jkR}/(4 pi R) and its pieces
// ---------------------------------------------------------------------------

/// Smallest separation accepted by the pointwise kernels.
inline constexpr double min_separation = 1e-14;

Complex green(double k, const Vec3& r, const Vec3& r_src);

/// Gradient with respect to r.
CVec3 grad_green(double k, const Vec3& r, const Vec3& r_src);

/// (G - 1/(4 pi R)) as a function of R >= 0; -jk/(4 pi) at R = 0.
Complex green_minus_static(double k, double R);

/// The radial derivative of (G - 1/(4 pi R)) divided by R, so that the
/// gradient of the remainder is this value times (r - r_src). Bounded but
/// direction dependent at R = 0, where 0 is returned.
Complex green_minus_static_grad(double k, double R);

/// (G - 1/(4 pi R) + k^2 R/(8 pi)): removes the two non-smooth leading terms.
Complex green_minus_static2(double k, double R);

/// Radial derivative of green_minus_static2 divided by R (bounded, jk^3/(12 pi) at 0).
Complex green_minus_static2_grad(double k, double R);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Symmetric rule on the reference triangle, barycentric points, weights summing to 1.
struct QuadratureRule
{
    int degree = 0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

/// Smallest tabulated rule that integrates polynomials of total degree `degree` exactly.
/// Degrees 1..8 are available.
const QuadratureRule& triangle_rule(int degree);

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule
{
    std::vector<double> x;
    std::vector<double> w;
};
GaussRule gauss_legendre(int n);

/// Four-dimensional rule for two triangles sharing 3, 2 or 1 vertices, in
/// the parametrisation where the shared vertices come first. Points are
/// barycentric coordinates on each triangle; weights sum to 1/4, so the
/// physical measure factor is (2 A1)(2 A2).
struct PairRule
{
    int shared = 0;
    std::vector<std::array<double, 3>> x;
    std::vector<std::array<double, 3>> y;
    std::vector<double> w;

    std::size_t size() const { return w.size(); }
};

/// Cached Sauter-Schwab rule with `order` Gauss points per direction.
const PairRule& sauter_schwab_rule(int shared, int order);

// ---------------------------------------------------------------------------
// Analytic panel potentials
// ---------------------------------------------------------------------------

/// Closed-form integrals over a flat triangle (a, b, c) seen from r:
///   scalar  = int 1/R dA'
///   vector  = int (r' - rho)/R dA'   (rho = projection of r on the panel plane)
///   gradient = int grad_r (1/R) dA'
/// On the panel itself the in-plane gradient is a principal value and the
/// normal part is taken as its average over both sides (zero).
struct PanelPotentials
{
    double scalar = 0.0;
    Vec3 vector = Vec3::Zero();
    Vec3 gradient = Vec3::Zero();
    Vec3 projection = Vec3::Zero();
};

PanelPotentials panel_potentials(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& r);

/// Convenience accessors; throw DegenerateTriangleError for zero-area panels.
double singular_panel_integral(const std::array<Vec3, 3>& tri, const Vec3& obs);
Vec3 singular_panel_gradient(const std::array<Vec3, 3>& tri, const Vec3& obs);

} // namespace mtfcma
