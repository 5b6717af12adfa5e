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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "mtfcma/cma.hpp"
#include "mtfcma/errors.hpp"
#include "mtfcma/fixtures.hpp"
#include "support/oracles.hpp"

using namespace mtfcma;

namespace
{

const Structure& grounded_patch()
{
    static const Structure s(fixtures::patch_on_box({0.04, 0.024, 2e-3, 6, 4, 1, true}));
    return s;
}

Media substrate()
{
    Media m;
    m.interior = {4.7, 1.0};
    return m;
}

CMatrix scalar(Complex v)
{
    return CMatrix::Constant(1, 1, v);
}

RMatrix random_symmetric(std::mt19937& rng, int n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = u(rng);
    return 0.5 * (a + a.transpose());
}

SchurOperator from_parts(const RMatrix& R, const RMatrix& X)
{
    const CMatrix Z = R.cast<Complex>() + j_unit * X.cast<Complex>();
    return schur(CMatrix(0, 0), CMatrix(0, R.rows()), CMatrix(R.rows(), 0), Z);
}

// Synthetic sample whose modes are the columns of a rotation; R = identity.
SweepSample synthetic(double f, const RMatrix& vectors, const std::vector<double>& lambda)
{
    SweepSample s;
    s.frequency = f;
    s.ok = true;
    s.modes.frequency = f;
    s.modes.rank = static_cast<int>(vectors.cols());
    s.modes.vectors = vectors;
    s.modes.lambda = Eigen::Map<const RVector>(lambda.data(), static_cast<Eigen::Index>(lambda.size()));
    s.modes.ms = s.modes.lambda.unaryExpr([](double l) { return modal_significance(l); });
    s.RI = vectors;
    return s;
}

RMatrix rotation(double a)
{
    RMatrix r = RMatrix::Identity(3, 3);
    r(0, 0) = std::cos(a);
    r(0, 1) = -std::sin(a);
    r(1, 0) = std::sin(a);
    r(1, 1) = std::cos(a);
    return r;
}

} // namespace

TEST_CASE("modal significance")
{
    CHECK(modal_significance(0.0) == 1.0);
    CHECK(modal_significance(1.0) == doctest::Approx(0.7071067811865475).epsilon(1e-15));
    CHECK(modal_significance(-1.0) == doctest::Approx(0.7071067811865475).epsilon(1e-15));
    CHECK(modal_significance(3.0) == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));
    CHECK(modal_significance(1e200) > 0.0);
}

TEST_CASE("Schur complement of explicit blocks")
{
    SUBCASE("scalar blocks")
    {
        const SchurOperator op = schur(scalar(2.0), scalar(1.0), scalar(1.0), scalar(3.0));
        CHECK(std::abs(op.Z_sub(0, 0) - 2.5) < 1e-15);
        CHECK(op.R(0, 0) == doctest::Approx(2.5));
        CHECK(op.X(0, 0) == 0.0);
        CHECK(op.z11);
    }
    SUBCASE("no coupling leaves Z22")
    {
        std::mt19937 rng(7);
        const RMatrix a = random_symmetric(rng, 4), b = random_symmetric(rng, 4);
        const CMatrix Z22 = a.cast<Complex>() + j_unit * b.cast<Complex>();
        const CMatrix Z11 = CMatrix::Identity(3, 3) * Complex(2.0, 1.0);
        const SchurOperator op = schur(Z11, CMatrix::Zero(3, 4), CMatrix::Zero(4, 3), Z22);
        CHECK((op.Z_sub - Z22).norm() == 0.0);
        CHECK(op.asymmetry == 0.0);
    }
    SUBCASE("empty non-accessible region")
    {
        const SchurOperator op = schur(CMatrix(0, 0), CMatrix(0, 1), CMatrix(1, 0), scalar(Complex(1.0, 2.0)));
        CHECK(op.Z_sub(0, 0) == Complex(1.0, 2.0));
        CHECK_FALSE(op.z11);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(schur(scalar(0.0), scalar(1.0), scalar(1.0), scalar(3.0)), SingularMatrixError);
        CHECK_THROWS_AS(schur(scalar(1.0), CMatrix::Ones(1, 2), scalar(1.0), scalar(3.0)), DimensionError);
        CHECK_THROWS_AS(schur(scalar(1.0), CMatrix(1, 0), CMatrix(0, 1), CMatrix(0, 0)), DimensionError);
        CMatrix z(2, 2);
        z << 1.0, 0.5, 0.5 + 1e-4, 2.0;
        CHECK_THROWS_AS(schur(CMatrix(0, 0), CMatrix(0, 2), CMatrix(2, 0), z), AsymmetryError);
    }
}

TEST_CASE("trivial eigenproblems")
{
    std::mt19937 rng(11);
    RMatrix A = random_symmetric(rng, 5);
    const RMatrix R = A * A.transpose() + RMatrix::Identity(5, 5);

    SUBCASE("X = 0")
    {
        const ModeSolution m = eig_modes(from_parts(R, RMatrix::Zero(5, 5)));
        CHECK(m.rank == 5);
        for (Eigen::Index i = 0; i < 5; ++i)
        {
            CHECK(std::abs(m.lambda(i)) < 1e-12);
            CHECK(m.ms(i) == doctest::Approx(1.0));
        }
    }
    SUBCASE("X = R")
    {
        const ModeSolution m = eig_modes(from_parts(R, R));
        for (Eigen::Index i = 0; i < 5; ++i)
        {
            CHECK(m.lambda(i) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(m.ms(i) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        }
    }
    SUBCASE("keep limits stored vectors only")
    {
        const ModeSolution m = eig_modes(from_parts(R, random_symmetric(rng, 5)), 1e-6, 2);
        CHECK(m.lambda.size() == 5);
        CHECK(m.vectors.cols() == 2);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(eig_modes(from_parts(-R, R)), EmptySubspace);
        CHECK_THROWS_AS(eig_modes(from_parts(RMatrix::Zero(5, 5), R)), EmptySubspace);
        SchurOperator bad = from_parts(R, R);
        bad.X.resize(3, 3);
        CHECK_THROWS_AS(eig_modes(bad), DimensionError);
    }
}

TEST_CASE("small generalized eigenproblems against Jacobi")
{
    std::mt19937 rng(2024);
    for (int n : {2, 3, 6, 8})
        for (int trial = 0; trial < 5; ++trial)
        {
            const RMatrix A = random_symmetric(rng, n);
            const RMatrix R = A * A.transpose() + 0.5 * RMatrix::Identity(n, n);
            const RMatrix X = 3.0 * random_symmetric(rng, n);
            const ModeSolution m = eig_modes(from_parts(R, X));
            const auto [ref_l, ref_v] = oracle::generalized_eigen(X, R);
            REQUIRE(m.rank == n);

            // match by value; the random draws have distinct eigenvalues
            for (Eigen::Index i = 0; i < n; ++i)
            {
                Eigen::Index best = 0;
                (ref_l.array() - m.lambda(i)).abs().minCoeff(&best);
                CHECK(std::abs(ref_l(best) - m.lambda(i)) < 1e-9 * std::max(1.0, std::abs(ref_l(best))));
                RVector v = ref_v.col(best);
                const RVector& w = m.vectors.col(i);
                if (v.dot(w) < 0.0)
                    v = -v;
                CHECK((v - w).norm() < 1e-9 * std::max(1.0, v.norm()));
                Eigen::Index imax = 0;
                w.cwiseAbs().maxCoeff(&imax);
                CHECK(w(imax) > 0.0);
            }
            for (Eigen::Index i = 1; i < n; ++i)
                CHECK(std::abs(m.lambda(i - 1)) <= std::abs(m.lambda(i)));
            const RMatrix G = m.vectors.transpose() * R * m.vectors;
            CHECK((G - RMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("rank-deficient R keeps the radiating subspace")
{
    std::mt19937 rng(5);
    const int n = 6;
    RMatrix B = random_symmetric(rng, n).leftCols(4);  // R of rank 4
    const RMatrix R = B * B.transpose();
    const RMatrix X = random_symmetric(rng, n);
    const ModeSolution m = eig_modes(from_parts(R, X));
    CHECK(m.rank == 4);
    CHECK(m.lambda.size() == 4);
    const RMatrix G = m.vectors.transpose() * R * m.vectors;
    CHECK((G - RMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
    // projected eigen equation holds inside the range of R
    const RMatrix res = B.transpose() * (X * m.vectors - R * m.vectors * m.lambda.asDiagonal());
    CHECK(res.cwiseAbs().maxCoeff() < 1e-9 * X.norm() * m.lambda.cwiseAbs().maxCoeff());
}

TEST_CASE("patch sub-structure operator")
{
    const Structure& s = grounded_patch();
    const BlockedSystem sys = assemble_system(s, substrate(), 2.4e9);
    const SchurOperator op = schur(sys);
    CHECK(op.asymmetry < 1e-6);
    CHECK((op.R - op.R.transpose()).norm() == 0.0);
    CHECK((op.X - op.X.transpose()).norm() == 0.0);

    SUBCASE("two solve paths agree")
    {
        const CMatrix Z11 = sys.Z11(), Z12 = sys.Z12(), Z21 = sys.Z21(), Z22 = sys.Z22();
        const CMatrix other = Z22 - Z21 * Z11.fullPivLu().solve(Z12);
        const CMatrix sym = 0.5 * (other + other.transpose());
        CHECK((op.Z_sub - sym).norm() < 1e-10 * sym.norm());
    }
    SUBCASE("driven accessible current through the Schur operator")
    {
        PlaneWave w;
        w.direction = Vec3(0.2, -0.1, -1.0).normalized();
        w.polarization = w.direction.cross(Vec3::UnitX()).normalized();
        const Excitation ex = assemble_excitation(s.mesh(), s.basis(), w, sys.frequency);
        const CurrentSolution full = solve_driven(sys, ex);
        const CVector V = sys.rhs(ex);
        const CVector V2 = V.tail(sys.n2()) - sys.Z21() * op.z11->solve(CVector(V.head(sys.n1())));
        const CVector I2 = op.Z_sub.partialPivLu().solve(V2);
        CHECK((I2 - full.Jr).norm() < 1e-8 * full.Jr.norm());
    }
    SUBCASE("modes")
    {
        const ModeSolution m = eig_modes(op);
        CHECK(m.rank > 0);
        CHECK(m.rank <= static_cast<int>(sys.n2()));
        for (Eigen::Index i = 0; i < m.lambda.size(); ++i)
        {
            CHECK(std::isfinite(m.lambda(i)));
            CHECK(m.ms(i) > 0.0);
            CHECK(m.ms(i) <= 1.0);
        }
        const RMatrix G = m.vectors.transpose() * op.R * m.vectors;
        CHECK((G - RMatrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-8);

        SchurOperator scaled = op;
        const double c = 3.7;
        scaled.Z_sub *= c;
        scaled.R *= c;
        scaled.X *= c;
        const ModeSolution ms = eig_modes(scaled);
        REQUIRE(ms.rank == m.rank);
        for (Eigen::Index i = 0; i < m.lambda.size(); ++i)
        {
            CHECK(std::abs(ms.lambda(i) - m.lambda(i)) < 1e-10 * std::max(1.0, std::abs(m.lambda(i))));
            CHECK(std::abs(ms.ms(i) - m.ms(i)) < 1e-10);
        }
    }
}

TEST_CASE("resonance rule on eigenvalue sequences")
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(resonance_index({3.0, 1.0, -1.0, -2.0}) == 1);
    CHECK(resonance_index({6.0, 7.5, 9.0, 12.0}) == -1);
    CHECK(resonance_index({-8.0, -6.0, -5.5}) == -1);
    CHECK(resonance_index({2.0, 1.5, 1.2}) == -1);  // no crossing, never below 1
    CHECK(resonance_index({2.0, 0.5, 0.8}) == 1);
    CHECK(resonance_index({4.0, 2.0, -3.0}) == 1);  // crossing, minimum off the crossing
    CHECK(resonance_index({nan, 0.3, nan, -0.2}) == 3);
    CHECK(resonance_index({}) == -1);
    CHECK(resonance_index({nan, nan}) == -1);
}

TEST_CASE("tracking follows vectors through an eigenvalue crossing")
{
    // mode a keeps vector e0 with lambda rising, mode b keeps e1 with lambda falling
    std::vector<SweepSample> samples;
    const std::vector<double> f = {1.0, 2.0, 3.0, 4.0, 5.0};
    for (std::size_t k = 0; k < f.size(); ++k)
    {
        const double la = -0.5 + 0.5 * static_cast<double>(k);
        const double lb = 2.0 - 0.6 * static_cast<double>(k);
        const double lc = 10.0;
        const RMatrix rot = rotation(0.05 * static_cast<double>(k));
        RMatrix v(3, 3);
        std::vector<double> l;
        // columns in ascending |lambda|
        std::vector<std::pair<double, int>> order = {{la, 0}, {lb, 1}, {lc, 2}};
        std::sort(order.begin(), order.end(),
                  [](const auto& x, const auto& y) { return std::abs(x.first) < std::abs(y.first); });
        for (int c = 0; c < 3; ++c)
        {
            v.col(c) = rot.col(order[static_cast<std::size_t>(c)].second);
            l.push_back(order[static_cast<std::size_t>(c)].first);
        }
        samples.push_back(synthetic(f[k], v, l));
    }
    SweepSample gap;
    gap.frequency = 3.5;
    samples.insert(samples.begin() + 3, gap);

    const auto fwd = link_samples(samples, false);
    const auto rev = link_samples(samples, true);
    REQUIRE(fwd.size() == 4);
    REQUIRE(rev.size() == fwd.size());
    for (std::size_t i = 0; i < fwd.size(); ++i)
    {
        CHECK(fwd[i].from == rev[i].from);
        CHECK(fwd[i].to == rev[i].to);
        CHECK(fwd[i].next == rev[i].next);
    }
    CHECK(fwd[2].from == 2);
    CHECK(fwd[2].to == 4);

    SweepResult r;
    r.samples = samples;
    for (const auto& s : samples)
        r.frequencies.push_back(s.frequency);
    r.links = fwd;
    r.tracked = track_modes(samples, fwd, 3);
    REQUIRE(r.tracked.size() == 3);
    for (std::size_t k = 0; k < samples.size(); ++k)
    {
        std::set<int> used;
        for (const auto& t : r.tracked)
            if (t.index[k] >= 0)
                CHECK(used.insert(t.index[k]).second);
        if (!samples[k].ok)
            CHECK(used.empty());
    }
    // mode 1 starts as the lambda = -0.5 mode and rises throughout
    std::vector<double> l1;
    for (std::size_t k = 0; k < samples.size(); ++k)
        if (samples[k].ok)
            l1.push_back(r.lambda(1, k));
    CHECK(l1 == std::vector<double>{-0.5, 0.0, 0.5, 1.0, 1.5});
    CHECK(std::isnan(r.lambda(1, 3)));
    CHECK(std::isnan(r.ms(1, 3)));
    CHECK(std::isnan(r.lambda(9, 0)));

    const auto res = find_resonances(r);
    REQUIRE(res.size() == 2);
    CHECK(res[0].mode_id == 1);
    CHECK(res[0].sample == 1);
    CHECK(res[0].frequency == 2.0);
    CHECK(res[1].mode_id == 2);
    CHECK(res[1].frequency == 4.0);  // lambda = 2 - 0.6 k, smallest at k = 3
    for (const auto& x : res)
        CHECK(std::find(r.frequencies.begin(), r.frequencies.end(), x.frequency) != r.frequencies.end());
}

TEST_CASE("sweep on a small patch")
{
    const Structure& s = grounded_patch();
    SweepOptions opt;
    opt.mode_count = 4;

    SUBCASE("single frequency")
    {
        const SweepResult r = sweep(s, substrate(), {2.0e9}, opt);
        REQUIRE(r.samples.size() == 1);
        CHECK(r.samples[0].ok);
        CHECK(r.links.empty());
        REQUIRE(r.tracked.size() == 4);
        for (const auto& t : r.tracked)
            CHECK(t.index[0] == t.id - 1);
    }
    SUBCASE("grid with a failing sample")
    {
        std::size_t calls = 0;
        const std::vector<double> grid = {-1.0, 2.0e9, 2.2e9, 2.4e9};
        const SweepResult r = sweep(s, substrate(), grid, opt,
                                    [&](std::size_t done, std::size_t total, const SweepSample&) {
                                        ++calls;
                                        CHECK(total == grid.size());
                                        CHECK(done == calls);
                                    });
        CHECK(calls == grid.size());
        CHECK_FALSE(r.samples[0].ok);
        CHECK(r.samples[0].error.find("-1 Hz") != std::string::npos);
        for (std::size_t k = 1; k < grid.size(); ++k)
        {
            REQUIRE(r.samples[k].ok);
            CHECK(r.samples[k].asymmetry < 1e-6);
            for (Eigen::Index i = 0; i < r.samples[k].modes.ms.size(); ++i)
                CHECK((r.samples[k].modes.ms(i) > 0.0 && r.samples[k].modes.ms(i) <= 1.0));
        }
        REQUIRE(r.links.size() == 2);
        const auto rev = link_samples(r.samples, true);
        for (std::size_t i = 0; i < r.links.size(); ++i)
            CHECK(r.links[i].next == rev[i].next);
        for (const auto& t : r.tracked)
            CHECK(t.index[0] == -1);
        for (std::size_t k = 1; k < grid.size(); ++k)
        {
            std::set<int> used;
            for (const auto& t : r.tracked)
                if (t.index[k] >= 0)
                    CHECK(used.insert(t.index[k]).second);
        }
        for (const auto& x : r.resonances)
            CHECK(std::find(grid.begin(), grid.end(), x.frequency) != grid.end());
    }
    SUBCASE("invalid grids")
    {
        CHECK_THROWS_AS(sweep(s, substrate(), {}, opt), DomainError);
        CHECK_THROWS_AS(sweep(s, substrate(), {2e9, 2e9}, opt), DomainError);
        CHECK_THROWS_AS(sweep(s, substrate(), {2e9, 1e9}, opt), DomainError);
        SweepOptions none;
        none.mode_count = 0;
        CHECK_THROWS_AS(sweep(s, substrate(), {2e9}, none), DomainError);
    }
}
