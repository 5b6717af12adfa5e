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

#include "mtfcma/reference.hpp"

#include <cmath>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

std::vector<double> spherical_jn(int nmax, double x)
{
    if (nmax < 0 || !(x > 0.0))
        throw DomainError("spherical_jn needs nmax >= 0 and x > 0");
    std::vector<double> j(static_cast<std::size_t>(nmax) + 1, 0.0);
    const int start = nmax + 20 + static_cast<int>(std::sqrt(40.0 * (nmax + x))) + static_cast<int>(x);
    double jp1 = 0.0, jn = 1e-300;
    for (int n = start; n > 0; --n)
    {
        const double jm1 = (2.0 * n + 1.0) / x * jn - jp1;
        jp1 = jn;
        jn = jm1;
        if (n - 1 <= nmax)
            j[static_cast<std::size_t>(n - 1)] = jn;
        if (n <= nmax)
            j[static_cast<std::size_t>(n)] = jp1;
        if (std::abs(jn) > 1e250)
        {
            jn *= 1e-250;
            jp1 *= 1e-250;
            for (int m = n - 1; m <= nmax; ++m)
                if (m >= 0)
                    j[static_cast<std::size_t>(m)] *= 1e-250;
        }
    }
    // normalise with whichever of j0, j1 is better conditioned
    const double j0 = std::sin(x) / x;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    double scale;
    if (std::abs(j0) >= std::abs(j1) || nmax == 0)
        scale = j0 / j[0];
    else
        scale = j1 / j[1];
    for (double& v : j)
        v *= scale;
    return j;
}

std::vector<double> spherical_yn(int nmax, double x)
{
    if (nmax < 0 || !(x > 0.0))
        throw DomainError("spherical_yn needs nmax >= 0 and x > 0");
    std::vector<double> y(static_cast<std::size_t>(nmax) + 1);
    y[0] = -std::cos(x) / x;
    if (nmax >= 1)
        y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
    for (int n = 2; n <= nmax; ++n)
        y[static_cast<std::size_t>(n)] =
            (2.0 * n - 1.0) / x * y[static_cast<std::size_t>(n - 1)] - y[static_cast<std::size_t>(n - 2)];
    return y;
}

int wiscombe_terms(double x)
{
    return static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
}

double MieSolution::k0() const
{
    return 2.0 * pi * frequency / c0;
}

namespace
{

// Riccati-Bessel psi_n = x j_n, xi_n = x (j_n + i y_n), n = 0..N, with derivatives.
struct Riccati
{
    std::vector<double> psi, dpsi;
    std::vector<Complex> xi, dxi;
};

Riccati riccati(int N, double x)
{
    const auto j = spherical_jn(N, x);
    const auto y = spherical_yn(N, x);
    Riccati r;
    r.psi.resize(static_cast<std::size_t>(N) + 1);
    r.dpsi.resize(r.psi.size());
    r.xi.resize(r.psi.size());
    r.dxi.resize(r.psi.size());
    for (int n = 0; n <= N; ++n)
    {
        const auto i = static_cast<std::size_t>(n);
        const Complex h(j[i], y[i]);
        r.psi[i] = x * j[i];
        r.xi[i] = x * h;
        if (n == 0)
        {
            r.dpsi[i] = std::cos(x);
            r.dxi[i] = Complex(std::cos(x), std::sin(x));  // d/dx (-i e^{ix})
        }
        else
        {
            // (x z_n)' = x z_{n-1} - n z_n
            r.dpsi[i] = x * j[i - 1] - n * j[i];
            r.dxi[i] = x * Complex(j[i - 1], y[i - 1]) - static_cast<double>(n) * h;
        }
    }
    return r;
}

// D_n(z) = psi_n'(z)/psi_n(z) by downward recurrence.
std::vector<double> log_derivative(int N, double z)
{
    const int start = std::max(N, static_cast<int>(std::abs(z))) + 20;
    std::vector<double> d(static_cast<std::size_t>(start) + 1, 0.0);
    for (int n = start; n > 0; --n)
        d[static_cast<std::size_t>(n - 1)] = n / z - 1.0 / (d[static_cast<std::size_t>(n)] + n / z);
    d.resize(static_cast<std::size_t>(N) + 1);
    return d;
}

MieSolution solve(double radius, double eps_r, double mu_r, double freq_hz, bool pec, int min_terms)
{
    if (!(radius > 0.0) || !(freq_hz > 0.0))
        throw DomainError("sphere radius and frequency must be positive");
    if (!pec && !(eps_r > 0.0 && mu_r > 0.0))
        throw DomainError("sphere material must be lossless with positive parameters");
    MieSolution s;
    s.radius = radius;
    s.eps_r = eps_r;
    s.mu_r = mu_r;
    s.frequency = freq_hz;
    s.pec = pec;
    const double x = s.size_parameter();
    const double m = std::sqrt(eps_r * mu_r);

    const int nw = std::max(wiscombe_terms(x), min_terms);
    const int nmax = nw + 60;
    const Riccati r = riccati(nmax, x);
    const std::vector<double> D = pec ? std::vector<double>() : log_derivative(nmax, m * x);

    double total = 0.0;
    for (int n = 1; n <= nmax; ++n)
    {
        const auto i = static_cast<std::size_t>(n);
        Complex an, bn;
        if (pec)
        {
            an = r.dpsi[i] / r.dxi[i];
            bn = r.psi[i] / r.xi[i];
        }
        else
        {
            an = (m * r.dpsi[i] - mu_r * r.psi[i] * D[i]) / (m * r.dxi[i] - mu_r * r.xi[i] * D[i]);
            bn = (mu_r * r.dpsi[i] - m * r.psi[i] * D[i]) / (mu_r * r.dxi[i] - m * r.xi[i] * D[i]);
        }
        if (!std::isfinite(std::abs(an)) || !std::isfinite(std::abs(bn)))
            throw ConvergenceError("non-finite Mie coefficient at n = " + std::to_string(n));
        s.a.push_back(an);
        s.b.push_back(bn);
        const double term = (2.0 * n + 1.0) * (std::abs(an) + std::abs(bn));
        total += term;
        if (n >= nw && term <= 1e-12 * std::max(total, 1e-300))
            return s;
    }
    throw ConvergenceError("Mie series did not decay below 1e-12 within " + std::to_string(nmax) + " terms (x = " +
                           std::to_string(x) + ")");
}

} // namespace

MieSolution mie_dielectric(double radius, double eps_r, double freq_hz, double mu_r, int min_terms)
{
    return solve(radius, eps_r, mu_r, freq_hz, false, min_terms);
}

MieSolution mie_pec(double radius, double freq_hz, int min_terms)
{
    return solve(radius, 1.0, 1.0, freq_hz, true, min_terms);
}

std::pair<Complex, Complex> MieSolution::amplitudes(double theta) const
{
    const double mu = std::cos(theta);
    Complex s1 = 0.0, s2 = 0.0;
    // angular functions pi_n, tau_n by recurrence
    double pim1 = 0.0, pin = 1.0;
    for (int n = 1; n <= terms(); ++n)
    {
        const double tau = n * mu * pin - (n + 1) * pim1;
        const double f = (2.0 * n + 1.0) / (n * (n + 1.0));
        const auto i = static_cast<std::size_t>(n - 1);
        s1 += f * (a[i] * pin + b[i] * tau);
        s2 += f * (a[i] * tau + b[i] * pin);
        const double next = ((2.0 * n + 1.0) * mu * pin - (n + 1.0) * pim1) / n;
        pim1 = pin;
        pin = next;
    }
    return {s1, s2};
}

double MieSolution::rcs_e_plane(double theta) const
{
    const double k = k0();
    return 4.0 * pi * std::norm(amplitudes(theta).second) / (k * k);
}

double MieSolution::rcs_h_plane(double theta) const
{
    const double k = k0();
    return 4.0 * pi * std::norm(amplitudes(theta).first) / (k * k);
}

double MieSolution::extinction_cross_section() const
{
    double sum = 0.0;
    for (int n = 1; n <= terms(); ++n)
        sum += (2.0 * n + 1.0) * (a[static_cast<std::size_t>(n - 1)] + b[static_cast<std::size_t>(n - 1)]).real();
    const double k = k0();
    return 2.0 * pi / (k * k) * sum;
}

double MieSolution::scattering_cross_section() const
{
    double sum = 0.0;
    for (int n = 1; n <= terms(); ++n)
        sum += (2.0 * n + 1.0) *
               (std::norm(a[static_cast<std::size_t>(n - 1)]) + std::norm(b[static_cast<std::size_t>(n - 1)]));
    const double k = k0();
    return 2.0 * pi / (k * k) * sum;
}

namespace
{

RcsCurve curve(const MieSolution& s, const std::vector<double>& theta_deg)
{
    RcsCurve c;
    c.theta_deg = theta_deg;
    for (double t : theta_deg)
    {
        const double th = t * pi / 180.0;
        c.sigma_e.push_back(s.rcs_e_plane(th));
        c.sigma_h.push_back(s.rcs_h_plane(th));
    }
    return c;
}

} // namespace

RcsCurve mie_dielectric_rcs(double radius, double eps_r, double freq_hz, const std::vector<double>& theta_deg)
{
    return curve(mie_dielectric(radius, eps_r, freq_hz), theta_deg);
}

RcsCurve pec_sphere_rcs(double radius, double freq_hz, const std::vector<double>& theta_deg)
{
    return curve(mie_pec(radius, freq_hz), theta_deg);
}

} // namespace mtfcma
