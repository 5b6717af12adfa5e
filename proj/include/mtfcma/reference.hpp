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

#include <vector>

#include "mtfcma/common.hpp"

namespace mtfcma
{

/// Spherical Bessel functions j_n(x), n = 0..nmax, by downward (Miller)
/// recurrence normalised to j_0 or j_1; stable for every n.
std::vector<double> spherical_jn(int nmax, double x);

/// Spherical Neumann functions y_n(x), n = 0..nmax, by upward recurrence.
std::vector<double> spherical_yn(int nmax, double x);

/// Plane-wave scattering by a homogeneous or perfectly conducting sphere.
/// Coefficients follow the e^{-i w t} textbook convention; every quantity
/// exposed here (cross sections, |S1|, |S2|) is convention independent.
class MieSolution
{
  public:
    double radius = 0.0;
    double eps_r = 1.0;
    double mu_r = 1.0;
    double frequency = 0.0;
    bool pec = false;

    double k0() const;
    double size_parameter() const { return k0() * radius; }
    int terms() const { return static_cast<int>(a.size()); }

    /// Amplitude functions S1 (perpendicular) and S2 (parallel) at scattering angle theta.
    std::pair<Complex, Complex> amplitudes(double theta_rad) const;

    /// Bistatic RCS in the E-plane (phi = 0, |S2|) and H-plane (phi = 90 deg, |S1|).
    double rcs_e_plane(double theta_rad) const;
    double rcs_h_plane(double theta_rad) const;

    double extinction_cross_section() const;
    double scattering_cross_section() const;

    std::vector<Complex> a, b;  // n = 1..N stored at index n-1
};

/// Minimum truncation x + 4 x^{1/3} + 2.
int wiscombe_terms(double x);

/// `min_terms` raises the truncation above the automatic choice.
/// Throws ConvergenceError when the series does not decay to 1e-12.
MieSolution mie_dielectric(double radius, double eps_r, double freq_hz, double mu_r = 1.0, int min_terms = 0);
MieSolution mie_pec(double radius, double freq_hz, int min_terms = 0);

struct RcsCurve
{
    std::vector<double> theta_deg;
    std::vector<double> sigma_e;  // E-plane
    std::vector<double> sigma_h;  // H-plane
};

RcsCurve mie_dielectric_rcs(double radius, double eps_r, double freq_hz, const std::vector<double>& theta_deg);
RcsCurve pec_sphere_rcs(double radius, double freq_hz, const std::vector<double>& theta_deg);

} // namespace mtfcma
