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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mtfcma/mtf.hpp"

namespace mtfcma
{

/// Z_sub = Z22 - Z21 Z11^{-1} Z12 with its symmetric real and imaginary parts.
struct SchurOperator
{
    double frequency = 0.0;
    CMatrix Z_sub;        // symmetrised
    RMatrix R;            // Re(Z_sub)
    RMatrix X;            // Im(Z_sub)
    double asymmetry = 0.0;  // max|Z - Z^T| / max|Z| before symmetrisation

    /// Factorisation of Z11, kept for recovering non-accessible currents.
    std::shared_ptr<const Eigen::PartialPivLU<CMatrix>> z11;
};

inline constexpr double max_schur_asymmetry = 1e-6;

SchurOperator schur(const BlockedSystem& sys);

/// Same from explicit blocks (Z11 may be empty).
SchurOperator schur(const CMatrix& Z11, const CMatrix& Z12, const CMatrix& Z21, const CMatrix& Z22,
                    double freq_hz = 0.0);

/// X I = lambda R I restricted to the radiating subspace of R.
struct ModeSolution
{
    double frequency = 0.0;
    RVector lambda;     // ascending |lambda|
    RMatrix vectors;    // R-normalised columns, same order (possibly truncated)
    RVector ms;         // 1/sqrt(1 + lambda^2)
    int rank = 0;       // retained dimension of the radiating subspace
};

double modal_significance(double lambda);

/// `keep` limits the number of stored eigenvectors (all when negative).
ModeSolution eig_modes(const SchurOperator& op, double rank_tol = 1e-6, int keep = -1);

// ---------------------------------------------------------------------------
// Frequency sweep
// ---------------------------------------------------------------------------

struct SweepOptions
{
    int mode_count = 10;
    double rank_tol = 1e-6;
    int candidates = 0;  // modes considered for tracking; 0 -> max(3 * mode_count, 20)
    SystemOptions system{};
};

struct SweepSample
{
    double frequency = 0.0;
    bool ok = false;
    std::string error;
    double asymmetry = 0.0;
    ModeSolution modes;
    RMatrix RI;  // R_sub times the stored eigenvectors
};

/// Links between consecutive usable samples: link[a] = index in the next
/// usable sample of the continuation of mode a (or -1).
struct SampleLink
{
    int from = -1;
    int to = -1;
    std::vector<int> next;
    std::vector<double> correlation;
};

struct TrackedMode
{
    int id = 0;                 // 1-based
    std::vector<int> index;     // eigen index per sample, -1 for a gap
};

struct Resonance
{
    int mode_id = 0;
    int sample = -1;
    double frequency = 0.0;
    double lambda = 0.0;
};

struct SweepResult
{
    std::vector<double> frequencies;
    std::vector<SweepSample> samples;
    std::vector<SampleLink> links;
    std::vector<TrackedMode> tracked;
    std::vector<Resonance> resonances;

    /// lambda / MS of tracked mode `id` at sample k (NaN for gaps).
    double lambda(int id, std::size_t k) const;
    double ms(int id, std::size_t k) const;
};

using SweepProgress = std::function<void(std::size_t done, std::size_t total, const SweepSample&)>;

SweepResult sweep(const Structure& structure, const Media& media, const std::vector<double>& frequencies,
                  const SweepOptions& options = {}, const SweepProgress& progress = {});

/// Greedy one-to-one assignment on the symmetrised correlation
/// 0.5 (|(R_k I_a)^T I_b| + |I_a^T (R_{k+1} I_b)|); identical whichever
/// direction the grid is walked in.
std::vector<SampleLink> link_samples(const std::vector<SweepSample>& samples, bool reverse = false);

/// Chains links into `mode_count` tracked modes, ids given by |lambda|
/// order at the first usable sample.
std::vector<TrackedMode> track_modes(const std::vector<SweepSample>& samples, const std::vector<SampleLink>& links,
                                     int mode_count);

/// Grid minimum of |lambda| per tracked mode, kept only if lambda changes
/// sign or |lambda| < 1 somewhere; ties go to the lower frequency.
std::vector<Resonance> find_resonances(const SweepResult& sweep);

/// Same rule on a bare eigenvalue sequence; returns the sample index or -1.
int resonance_index(const std::vector<double>& lambda);

} // namespace mtfcma
