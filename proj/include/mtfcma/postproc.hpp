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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mtfcma/cma.hpp"
#include "mtfcma/mtf.hpp"

namespace mtfcma
{

/// Current reconstructed at triangle centroids of one surface.
struct SurfaceCurrentMap
{
    UnknownGroup group = UnknownGroup::Jr;
    std::vector<int> triangles;       // mesh triangle ids
    std::vector<CVec3> value;         // sum_q c_q f_q(centroid)
    std::vector<double> magnitude;    // |value|
};

/// Throws MissingGroupError when the coefficient vector of `group` is
/// empty or does not match the basis.
SurfaceCurrentMap eigencurrent_map(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& solution,
                                   UnknownGroup group);
SurfaceCurrentMap eigencurrent_map(const TaggedMesh& mesh, const RwgBasis& basis, UnknownGroup group,
                                   const CVector& coefficients);

/// Regular (theta, phi) grid in degrees.
struct FarFieldGrid
{
    std::vector<double> theta_deg;
    std::vector<double> phi_deg;

    static FarFieldGrid cuts(double step_deg = 1.0);  // theta 0..180, phi {0, 90}
    static FarFieldGrid single(double theta_deg, double phi_deg);
    void validate() const;
};

/// Far-zone amplitude F with E = F exp(-j k r) / r. Rows follow theta,
/// columns phi.
struct FarFieldPattern
{
    FarFieldGrid grid;
    double frequency = 0.0;
    CMatrix e_theta;
    CMatrix e_phi;
    bool normalized = false;

    double magnitude(Eigen::Index it, Eigen::Index ip) const;
};

Vec3 direction(double theta_deg, double phi_deg);
Vec3 theta_hat(double theta_deg, double phi_deg);
Vec3 phi_hat(double theta_deg, double phi_deg);

/// Radiation of every exterior current: Jd, Jg, Jr and Md (stored as M/eta0).
FarFieldPattern far_field(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& currents,
                          double freq_hz, const FarFieldGrid& grid, int degree = 4);

/// Divides by the peak magnitude.
FarFieldPattern normalize(const FarFieldPattern& pattern);

/// sigma = 4 pi |F|^2 / |E0|^2 per grid point. NormalizationError for a
/// peak-normalized pattern.
RMatrix rcs(const FarFieldPattern& pattern, Complex amplitude);

/// Total scattering cross section: |F|^2 integrated over the sphere of
/// directions (Gauss-Legendre in cos theta, uniform in phi) divided by |E0|^2.
double scattering_cross_section(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& currents,
                                double freq_hz, Complex amplitude, int n_theta = 48, int n_phi = 64);

/// Extinction cross section from the forward amplitude (optical theorem,
/// exp(+jwt)): sigma_ext = -(4 pi / k) Im(p* . F(k_inc) / E0).
double extinction_cross_section(const TaggedMesh& mesh, const RwgBasis& basis, const CurrentSolution& currents,
                                const PlaneWave& wave, double freq_hz);

/// Surface currents for near-field evaluation; magnetic coefficients are M/eta0
/// on the dielectric surface.
struct SurfaceSources
{
    std::vector<std::pair<SurfaceRole, CVector>> electric;
    CVector magnetic;
};

SurfaceSources exterior_sources(const CurrentSolution& currents);

/// E = eta L{J} - eta0 K{M/eta0} in `medium` at point r (off the surfaces).
CVec3 radiated_field(const TaggedMesh& mesh, const RwgBasis& basis, const SurfaceSources& sources,
                     const Medium& medium, double freq_hz, const Vec3& r, int degree = 8);

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// freq_hz,mode_1,...,mode_K with 17 significant digits; gaps are "nan".
void write_ms_csv(const SweepResult& sweep, int mode_count, const std::filesystem::path& path);

struct MsTable
{
    std::vector<std::string> header;
    std::vector<double> frequency;
    std::vector<std::vector<double>> ms;  // [mode][sample]
};
MsTable read_ms_csv(const std::filesystem::path& path);

/// mode_id,freq_hz,lambda,ms
void write_resonances_csv(const SweepResult& sweep, const std::filesystem::path& path);

/// Legacy VTK ASCII POLYDATA with one CELL_DATA scalar.
void write_vtk(const TaggedMesh& mesh, const SurfaceCurrentMap& map, const std::filesystem::path& path,
               const std::string& field_name = "current_magnitude");

/// theta_deg,phi_deg,Etheta_re,Etheta_im,Ephi_re,Ephi_im
void write_far_field_csv(const FarFieldPattern& pattern, const std::filesystem::path& path);

/// theta_deg,phi_deg,rcs_m2,rcs_dbsm
void write_rcs_csv(const FarFieldGrid& grid, const RMatrix& sigma, const std::filesystem::path& path);

/// MS against frequency, one polyline per tracked mode.
void write_ms_svg(const SweepResult& sweep, int mode_count, const std::filesystem::path& path);

std::string format_double(double v);

} // namespace mtfcma
