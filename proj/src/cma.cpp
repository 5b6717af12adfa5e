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

#include "mtfcma/cma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mtfcma/errors.hpp"

namespace mtfcma
{

namespace
{

SchurOperator finish_schur(CMatrix Z, double freq_hz)
{
    SchurOperator op;
    op.frequency = freq_hz;
    const double scale = Z.cwiseAbs().maxCoeff();
    op.asymmetry = scale > 0.0 ? (Z - Z.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
    if (!(op.asymmetry < max_schur_asymmetry))
    {
        std::ostringstream os;
        os << "Schur complement asymmetry " << op.asymmetry << " exceeds " << max_schur_asymmetry << " at "
           << freq_hz << " Hz";
        throw AsymmetryError(os.str());
    }
    op.Z_sub = 0.5 * (Z + Z.transpose());
    op.R = op.Z_sub.real();
    op.X = op.Z_sub.imag();
    return op;
}

template <class A, class B, class C, class D>
SchurOperator schur_impl(const A& Z11, const B& Z12, const C& Z21, const D& Z22, double freq_hz)
{
    if (Z22.rows() == 0)
        throw DimensionError("the accessible region has no unknowns");
    if (Z11.rows() == 0)
        return finish_schur(CMatrix(Z22), freq_hz);
    auto lu = std::make_shared<Eigen::PartialPivLU<CMatrix>>(Z11);
    const double rcond = lu->rcond();
    if (!(rcond >= 1e-13))
    {
        std::ostringstream os;
        os << "Z11 is numerically singular at " << freq_hz << " Hz (rcond estimate " << rcond << ")";
        throw SingularMatrixError(os.str());
    }
    const CMatrix Y = lu->solve(CMatrix(Z12));
    CMatrix Z = Z22;
    Z.noalias() -= Z21 * Y;
    SchurOperator op = finish_schur(std::move(Z), freq_hz);
    op.z11 = std::move(lu);
    return op;
}

} // namespace

SchurOperator schur(const BlockedSystem& sys)
{
    return schur_impl(sys.Z11(), sys.Z12(), sys.Z21(), sys.Z22(), sys.frequency);
}

SchurOperator schur(const CMatrix& Z11, const CMatrix& Z12, const CMatrix& Z21, const CMatrix& Z22, double freq_hz)
{
    if (Z11.rows() != Z11.cols() || Z22.rows() != Z22.cols() || Z12.rows() != Z11.rows() ||
        Z12.cols() != Z22.rows() || Z21.rows() != Z22.rows() || Z21.cols() != Z11.rows())
        throw DimensionError("Schur blocks do not conform");
    return schur_impl(Z11, Z12, Z21, Z22, freq_hz);
}

double modal_significance(double lambda)
{
    return 1.0 / std::hypot(1.0, lambda);
}

ModeSolution eig_modes(const SchurOperator& op, double rank_tol, int keep)
{
    const auto n = op.R.rows();
    if (n == 0 || op.X.rows() != n)
        throw DimensionError("empty or mismatched R/X");
    Eigen::SelfAdjointEigenSolver<RMatrix> rs(op.R);
    if (rs.info() != Eigen::Success)
        throw EigFailure("eigendecomposition of R_sub failed");
    const RVector& sigma = rs.eigenvalues();
    const double smax = sigma.maxCoeff();
    if (!(smax > 0.0))
        throw EmptySubspace("R_sub has no positive eigenvalue");

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < n; ++i)
        if (sigma(i) > rank_tol * smax)
            kept.push_back(i);
    if (kept.empty())
        throw EmptySubspace("no eigenvalue of R_sub above the rank threshold");
    const auto r = static_cast<Eigen::Index>(kept.size());

    RMatrix W(n, r);
    for (Eigen::Index c = 0; c < r; ++c)
        W.col(c) = rs.eigenvectors().col(kept[static_cast<std::size_t>(c)]) /
                   std::sqrt(sigma(kept[static_cast<std::size_t>(c)]));
    RMatrix Xp = W.transpose() * op.X * W;
    Xp = 0.5 * (Xp + Xp.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RMatrix> xs(Xp);
    if (xs.info() != Eigen::Success)
        throw EigFailure("projected eigenproblem failed");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&xs](Eigen::Index a, Eigen::Index b) {
        return std::abs(xs.eigenvalues()(a)) < std::abs(xs.eigenvalues()(b));
    });

    const Eigen::Index nkeep = keep < 0 ? r : std::min<Eigen::Index>(keep, r);
    ModeSolution sol;
    sol.frequency = op.frequency;
    sol.rank = static_cast<int>(r);
    sol.lambda.resize(r);
    sol.ms.resize(r);
    sol.vectors.resize(n, nkeep);
    for (Eigen::Index i = 0; i < r; ++i)
    {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        sol.lambda(i) = xs.eigenvalues()(src);
        sol.ms(i) = modal_significance(sol.lambda(i));
        if (i < nkeep)
        {
            RVector v = W * xs.eigenvectors().col(src);
            Eigen::Index imax = 0;
            v.cwiseAbs().maxCoeff(&imax);
            if (v(imax) < 0.0)
                v = -v;
            sol.vectors.col(i) = v;
        }
    }
    return sol;
}

// ---------------------------------------------------------------------------

double SweepResult::lambda(int id, std::size_t k) const
{
    for (const auto& t : tracked)
        if (t.id == id)
        {
            const int i = t.index[k];
            if (i < 0 || !samples[k].ok)
                return std::numeric_limits<double>::quiet_NaN();
            return samples[k].modes.lambda(i);
        }
    return std::numeric_limits<double>::quiet_NaN();
}

double SweepResult::ms(int id, std::size_t k) const
{
    const double l = lambda(id, k);
    return std::isnan(l) ? l : modal_significance(l);
}

SweepResult sweep(const Structure& structure, const Media& media, const std::vector<double>& frequencies,
                  const SweepOptions& options, const SweepProgress& progress)
{
    if (frequencies.empty())
        throw DomainError("empty frequency grid");
    for (std::size_t i = 1; i < frequencies.size(); ++i)
        if (!(frequencies[i] > frequencies[i - 1]))
            throw DomainError("frequency grid must be strictly increasing");
    if (options.mode_count < 1)
        throw DomainError("mode_count must be at least 1");
    const int candidates = options.candidates > 0 ? options.candidates : std::max(3 * options.mode_count, 20);

    SweepResult result;
    result.frequencies = frequencies;
    result.samples.resize(frequencies.size());
    for (std::size_t i = 0; i < frequencies.size(); ++i)
    {
        SweepSample& s = result.samples[i];
        s.frequency = frequencies[i];
        try
        {
            SchurOperator op;
            {
                const BlockedSystem sys = assemble_system(structure, media, frequencies[i], options.system);
                op = schur(sys);
            }
            op.z11.reset();
            s.asymmetry = op.asymmetry;
            s.modes = eig_modes(op, options.rank_tol, candidates);
            s.RI = op.R * s.modes.vectors;
            s.ok = true;
        }
        catch (const Error& e)
        {
            s.ok = false;
            std::ostringstream os;
            os << frequencies[i] << " Hz: " << e.what();
            s.error = os.str();
        }
        if (progress)
            progress(i + 1, frequencies.size(), s);
    }
    result.links = link_samples(result.samples);
    result.tracked = track_modes(result.samples, result.links, options.mode_count);
    result.resonances = find_resonances(result);
    return result;
}

namespace
{

// Correlation between modes of sample a (rows) and sample b (columns).
RMatrix correlation(const SweepSample& a, const SweepSample& b)
{
    const RMatrix c1 = a.RI.transpose() * b.modes.vectors;
    const RMatrix c2 = a.modes.vectors.transpose() * b.RI;
    return 0.5 * (c1.cwiseAbs() + c2.cwiseAbs());
}

struct Candidate
{
    double c;
    int lower;  // index in the lower-frequency sample
    int upper;
};

// Greedy one-to-one matching, best correlation first, ties by (lower, upper).
std::vector<int> greedy(std::vector<Candidate> cands, int n_lower)
{
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        if (x.c != y.c)
            return x.c > y.c;
        if (x.lower != y.lower)
            return x.lower < y.lower;
        return x.upper < y.upper;
    });
    std::vector<int> next(static_cast<std::size_t>(n_lower), -1);
    std::vector<bool> taken;
    for (const auto& c : cands)
    {
        if (static_cast<std::size_t>(c.upper) >= taken.size())
            taken.resize(static_cast<std::size_t>(c.upper) + 1, false);
        if (next[static_cast<std::size_t>(c.lower)] >= 0 || taken[static_cast<std::size_t>(c.upper)])
            continue;
        next[static_cast<std::size_t>(c.lower)] = c.upper;
        taken[static_cast<std::size_t>(c.upper)] = true;
    }
    return next;
}

} // namespace

std::vector<SampleLink> link_samples(const std::vector<SweepSample>& samples, bool reverse)
{
    std::vector<int> usable;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].ok)
            usable.push_back(static_cast<int>(i));
    std::vector<SampleLink> links;
    if (usable.size() < 2)
        return links;
    links.resize(usable.size() - 1);

    for (std::size_t step = 0; step + 1 < usable.size(); ++step)
    {
        const std::size_t p = reverse ? usable.size() - 2 - step : step;
        const SweepSample& lo = samples[static_cast<std::size_t>(usable[p])];
        const SweepSample& hi = samples[static_cast<std::size_t>(usable[p + 1])];
        // walking downwards the matrix is built from the upper sample
        const RMatrix C = reverse ? RMatrix(correlation(hi, lo).transpose()) : correlation(lo, hi);
        std::vector<Candidate> cands;
        cands.reserve(static_cast<std::size_t>(C.size()));
        for (Eigen::Index a = 0; a < C.rows(); ++a)
            for (Eigen::Index b = 0; b < C.cols(); ++b)
                cands.push_back({C(a, b), static_cast<int>(a), static_cast<int>(b)});
        SampleLink& link = links[p];
        link.from = usable[p];
        link.to = usable[p + 1];
        link.next = greedy(std::move(cands), static_cast<int>(C.rows()));
        link.correlation.assign(link.next.size(), 0.0);
        for (std::size_t a = 0; a < link.next.size(); ++a)
            if (link.next[a] >= 0)
                link.correlation[a] = C(static_cast<Eigen::Index>(a), link.next[a]);
    }
    return links;
}

std::vector<TrackedMode> track_modes(const std::vector<SweepSample>& samples, const std::vector<SampleLink>& links,
                                     int mode_count)
{
    std::vector<TrackedMode> tracked;
    int first = -1;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].ok)
        {
            first = static_cast<int>(i);
            break;
        }
    if (first < 0)
        return tracked;
    const int n = std::min<int>(mode_count, static_cast<int>(samples[static_cast<std::size_t>(first)].modes.vectors.cols()));
    for (int id = 1; id <= n; ++id)
    {
        TrackedMode t;
        t.id = id;
        t.index.assign(samples.size(), -1);
        int current = id - 1;
        t.index[static_cast<std::size_t>(first)] = current;
        for (const auto& link : links)
        {
            if (current < 0 || link.from < first)
                continue;
            current = current < static_cast<int>(link.next.size()) ? link.next[static_cast<std::size_t>(current)] : -1;
            if (current >= 0)
                t.index[static_cast<std::size_t>(link.to)] = current;
        }
        tracked.push_back(std::move(t));
    }
    return tracked;
}

int resonance_index(const std::vector<double>& lambda)
{
    int best = -1;
    bool sign_change = false;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < lambda.size(); ++i)
    {
        const double l = lambda[i];
        if (std::isnan(l))
            continue;
        if (!std::isnan(prev) && (prev * l < 0.0 || l == 0.0))
            sign_change = true;
        prev = l;
        if (best < 0 || std::abs(l) < std::abs(lambda[static_cast<std::size_t>(best)]))
            best = static_cast<int>(i);
    }
    if (best < 0)
        return -1;
    if (sign_change || std::abs(lambda[static_cast<std::size_t>(best)]) < 1.0)
        return best;
    return -1;
}

std::vector<Resonance> find_resonances(const SweepResult& sweep)
{
    std::vector<Resonance> out;
    for (const auto& t : sweep.tracked)
    {
        std::vector<double> l(sweep.samples.size());
        for (std::size_t k = 0; k < l.size(); ++k)
            l[k] = sweep.lambda(t.id, k);
        const int i = resonance_index(l);
        if (i < 0)
            continue;
        out.push_back({t.id, i, sweep.frequencies[static_cast<std::size_t>(i)], l[static_cast<std::size_t>(i)]});
    }
    return out;
}

} // namespace mtfcma
