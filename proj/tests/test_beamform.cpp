// SPDX-License-Identifier: Apache-2.0
//
// masound - wideband channel sounding with multiplicative arrays
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

#include "masound/beamform.hpp"
#include "masound/transform.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace masound;
using masound::testkit::Rng;

namespace
{
    const FrequencyGrid band = FrequencyGrid::from_band(26e9, 4e9, 1500);

    PathSet fig4_paths()
    {
        return {PathComponent::from_db(0.0, 60.0, 80.0, 10e-9), PathComponent::from_db(-12.0, 80.0, 20.0, 20e-9)};
    }

    PathSet fig5_paths()
    {
        return {PathComponent::from_db(0.0, 90.0, 180.0, 15e-9), PathComponent::from_db(-12.0, 90.0, 180.0, 20e-9)};
    }

    // Positive-quadrant lattice holding every Fig. 4 term away from the lattice border
    AngularGrid quadrant(std::size_t n)
    {
        UvLattice l;
        l.u_axis = linear_axis(0.0, 1.0, 1.0 / double(n - 1));
        l.v_axis = l.u_axis;
        return AngularGrid::from_lattice(l);
    }

    Taper chebyshev_pair(std::size_t n)
    {
        const ExcitationVector w = chebyshev_taper(n, 30.0);
        return {w, w};
    }

    struct Located
    {
        double u, v, level;
    };

    std::vector<Located> beam_maxima(const BeamPattern &b, double range_db)
    {
        std::vector<Located> out;
        for (const auto &p : find_peaks(b.levels_db(), b.grid.rows(), b.grid.cols(), range_db, 3, 3))
            out.push_back({b.grid.axis0[p.row], b.grid.axis1[p.col], p.level_db});
        return out;
    }

    const Located *near(const std::vector<Located> &peaks, double u, double v, double cell)
    {
        for (const auto &p : peaks)
            if (std::abs(p.u - u) <= cell && std::abs(p.v - v) <= cell)
                return &p;
        return nullptr;
    }
} // namespace

TEST(DelayTransformTest, OnBinExponentialMapsToUnitImpulse)
{
    const FrequencyGrid g = FrequencyGrid::from_band(26e9, 2e9, 750);
    const DelayTransform tr(g, 4);
    ASSERT_EQ(tr.delay_bins(), 3000u);
    const double tau = tr.delays()[123];
    std::vector<cdouble> x(750);
    for (std::size_t l = 0; l < 750; ++l)
        x[l] = std::polar(1.0, -2.0 * pi * g.at(l) * tau);
    const auto b = tr.inverse(x);
    EXPECT_NEAR(std::abs(b[123] - 1.0), 0.0, 1e-12);
    const auto it = std::max_element(b.begin(), b.end(), [](cdouble a, cdouble c) { return std::abs(a) < std::abs(c); });
    EXPECT_EQ(it - b.begin(), 123);
}

TEST(DelayTransformTest, ForwardInverseRoundTrip)
{
    Rng rng(1);
    const FrequencyGrid g = FrequencyGrid::from_band(1e9, 1e9, 37);
    const DelayTransform tr(g, 3);
    CMatrix X(4, 37);
    for (Eigen::Index i = 0; i < X.size(); ++i)
        X.data()[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const CMatrix back = tr.forward_rows(tr.inverse_rows(X));
    EXPECT_LT((back - X).cwiseAbs().maxCoeff(), 1e-12);

    const CMatrix b = tr.inverse_rows(X);
    std::vector<cdouble> row(X.row(2).data(), X.row(2).data() + 37);
    for (const std::size_t k : {0u, 5u, 60u, 110u})
        EXPECT_LT(std::abs(tr.inverse_at(row, tr.delays()[k]) - b(2, Eigen::Index(k))), 1e-12);
}

TEST(CbfUra, UnitPathAtItsDirection)
{
    const PathComponent p{1.0, {40.0, 130.0}, 5e-9};
    const CfrSet h = gen_ura_cfr({p}, {9, 7, 0.5, 0.5}, band);
    const AngularGrid one{AngularGrid::Kind::theta_phi, {40.0}, {130.0}};
    for (const std::size_t l : {0u, 700u, 1499u})
        EXPECT_NEAR(std::abs(cbf_ura(h, one, band.at(l)).values[0]), 1.0, 1e-12);
    const Taper t = chebyshev_pair(9);
    const Taper ty{t.x, chebyshev_taper(7, 30.0)};
    EXPECT_NEAR(std::abs(cbf_ura(h, one, band.at(3), ty).values[0]), 1.0, 1e-12);
}

TEST(CbfUra, SinglePointMatchesDirectSum)
{
    Rng rng(8);
    const FrequencyGrid g = FrequencyGrid::from_band(26e9, 1e9, 16);
    PathSet paths;
    for (int k = 0; k < 3; ++k)
        paths.push_back({rng.phasor(), {rng.uniform(0, 90), rng.uniform(0, 359)}, rng.uniform(0, 7e-9)});
    const CfrSet h = gen_ura_cfr(paths, {5, 3, 0.45, 0.4}, g);
    const AngularGrid one{AngularGrid::Kind::theta_phi, {33.0}, {251.0}};
    const ExcitationVector wx = ExcitationVector::real({0.3, 0.9, 1.0, 0.9, 0.3}), wy = ExcitationVector::real({0.5, 1.0, 0.5});
    EXPECT_LT(std::abs(cbf_ura(h, one, g.at(5)).values[0] - testkit::direct_beam(h, one.uv(0, 0), 5)), 1e-12);
    EXPECT_LT(std::abs(cbf_ura(h, one, g.at(9), Taper{wx, wy}).values[0] - testkit::direct_beam(h, one.uv(0, 0), 9, &wx, &wy)), 1e-12);
}

TEST(CbfUra, RejectsOffGridFrequencyAndBadTaper)
{
    const CfrSet h = gen_ura_cfr({PathComponent{}}, {3, 3, 0.5, 0.5}, band);
    const AngularGrid one{AngularGrid::Kind::theta_phi, {0.0}, {0.0}};
    EXPECT_THROW(cbf_ura(h, one, band.at(3) + 0.5 * band.spacing()), ValidationError);
    EXPECT_THROW(cbf_ura(h, one, band.at(3), chebyshev_pair(5)), ValidationError);
}

TEST(CbfUra, TwoPathFieldShowsTwoMaxima)
{
    const CfrSet h = gen_ura_cfr(fig4_paths(), {21, 21, 0.5, 0.5}, band);
    const AngularGrid grid = quadrant(201);
    const auto peaks = beam_maxima(cbf_ura(h, grid, band.at(band.center_index()), chebyshev_pair(21)), 20.0);
    ASSERT_EQ(peaks.size(), 2u);
    const double cell = 0.005 + 1e-9;
    const Located *a = near(peaks, 0.1504, 0.8529, cell), *b = near(peaks, 0.9254, 0.3368, cell);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(a->level, 0.0, 0.5);
    EXPECT_NEAR(b->level, -12.0, 0.5);
}

TEST(CbfMa, UnitPathAtItsDirection)
{
    const MaCfr h = gen_ma_cfr({PathComponent{1.0, {70.0, 200.0}, 0.0}}, {11, 15, 0.5}, band);
    const AngularGrid one{AngularGrid::Kind::theta_phi, {70.0}, {200.0}};
    EXPECT_NEAR(std::abs(cbf_ma(h, one, band.at(100)).values[0]), 1.0, 1e-12);
}

TEST(CbfMa, FakeTermsAtCrossedCoordinates)
{
    const MaCfr h = gen_ma_cfr(fig4_paths(), {41, 41, 0.5}, band);
    const AngularGrid grid = quadrant(201);
    const ExcitationVector w = auto_convolve(chebyshev_taper(21, 30.0));
    const auto peaks = beam_maxima(cbf_ma(h, grid, band.at(band.center_index()), Taper{w, w}), 20.0);
    ASSERT_EQ(peaks.size(), 4u);
    const double cell = 0.005 + 1e-9;
    const double u1 = 0.1504, v1 = 0.8529, u2 = 0.9254, v2 = 0.3368;
    const struct
    {
        double u, v, level;
    } expected[] = {{u1, v1, 0.0}, {u2, v2, -12.0}, {u1, v2, -6.0}, {u2, v1, -6.0}};
    for (const auto &e : expected)
    {
        const Located *p = near(peaks, e.u, e.v, cell);
        ASSERT_TRUE(p) << e.u << ", " << e.v;
        EXPECT_NEAR(p->level, e.level, 0.5);
    }
}

TEST(CbfMa, SinglePathArgmaxMatchesUra)
{
    Rng rng(4);
    const ScanGrid scan{linear_axis(0.0, 90.0, 2.0), linear_axis(0.0, 358.0, 2.0), {}};
    const AngularGrid grid = AngularGrid::from_scan(scan);
    for (int trial = 0; trial < 20; ++trial)
    {
        const PathComponent p = testkit::random_grid_path(rng, {linear_axis(10.0, 80.0, 2.0), scan.phi_axis, {}}, 1e-9, 20e-9, 0.0);
        const double f = band.at(band.center_index());
        const Peak a = strongest(cbf_ma(gen_ma_cfr({p}, {21, 21, 0.5}, band), grid, f));
        const Peak b = strongest(cbf_ura(gen_ura_cfr({p}, {11, 11, 0.5, 0.5}, band), grid, f));
        EXPECT_LE(std::abs(long(a.row) - long(b.row)), 1);
        EXPECT_LE(std::abs(long(a.col) - long(b.col)), 1);
    }
}

TEST(CbfMa, ThreePathCenterFrequencyShowsEightMaxima)
{
    const PathSet paths{PathComponent::from_db(0.0, 60.0, 120.0, 12e-9), PathComponent::from_db(-10.0, 30.0, 140.0, 40e-9),
                        PathComponent::from_db(-15.0, 80.0, 220.0, 13e-9)};
    const MaCfr h = gen_ma_cfr(paths, {199, 199, 0.5}, band);
    const double f = band.at(band.center_index());
    const auto terms = predict_ma_terms(paths);
    ASSERT_EQ(terms.size(), 9u);

    // Nine terms, one of which, (u3, v1), falls outside the visible disc
    std::size_t maxima = 0;
    for (const auto &t : terms)
    {
        if (t.u * t.u + t.v * t.v > 1.0)
            continue;
        const auto level = testkit::term_maximum_level(h, f, t.u, t.v);
        ASSERT_TRUE(level) << "no maximum at term (" << t.origin.first << ", " << t.origin.second << ")";
        EXPECT_NEAR(*level, t.level_db, 1.0);
        ++maxima;
    }
    EXPECT_EQ(maxima, 8u);
}

TEST(PadpUra, OnBinPathGivesUnitPeak)
{
    const CfrSet h = gen_ura_cfr({PathComponent{1.0, {90.0, 180.0}, 15e-9}}, {5, 5, 0.5, 0.5}, band);
    const Padp p = padp_ura(h, 90.0, linear_axis(170.0, 190.0, 1.0), 4);
    const Peak k = strongest(p);
    EXPECT_NEAR(p.delay_axis[k.row], 15e-9, 1e-18);
    EXPECT_EQ(p.phi_axis[k.col], 180.0);
    EXPECT_NEAR(std::abs(p.at(k.row, k.col)), 1.0, 1e-12);
}

TEST(PadpUra, MatchesDirectDoubleSum)
{
    Rng rng(12);
    const FrequencyGrid g = FrequencyGrid::from_band(26e9, 2e9, 48);
    const PathSet paths{{rng.phasor(), {50.0, 120.0}, 3e-9}, {0.4 * rng.phasor(), {20.0, 200.0}, 7.3e-9}};
    const CfrSet h = gen_ura_cfr(paths, {5, 5, 0.5, 0.5}, g);
    const std::vector<double> phi = linear_axis(0.0, 350.0, 10.0);
    const Padp p = padp_ura(h, 50.0, phi, 4);
    for (int i = 0; i < 10; ++i)
    {
        const std::size_t d = std::size_t(rng.integer(0, long(p.delay_axis.size()) - 1));
        const std::size_t c = std::size_t(rng.integer(0, long(phi.size()) - 1));
        EXPECT_LT(std::abs(p.at(d, c) - testkit::direct_padp_ura(h, {50.0, phi[c]}, p.delay_axis[d])), 1e-9);
    }
}

TEST(PadpUra, TwoPathsAtOneDirection)
{
    const CfrSet h = gen_ura_cfr(fig5_paths(), {21, 21, 0.5, 0.5}, band);
    const Padp p = padp_ura(h, 90.0, {180.0}, 4);
    const auto peaks = find_peaks(p, 13.0, 48, 3);
    ASSERT_EQ(peaks.size(), 2u);
    const double bin = p.delay_axis[1];
    EXPECT_NEAR(p.delay_axis[peaks[0].row], 15e-9, bin);
    EXPECT_NEAR(peaks[0].level_db, 0.0, 0.5);
    EXPECT_NEAR(p.delay_axis[peaks[1].row], 20e-9, bin);
    EXPECT_NEAR(peaks[1].level_db, -12.0, 0.5);
}

TEST(PadpMa, DelayDoubling)
{
    const MaCfr h = gen_ma_cfr(fig5_paths(), {41, 41, 0.5}, band);
    const Padp p = padp_ma(h, 90.0, {180.0}, 4);
    const auto peaks = find_peaks(p, 13.0, 48, 3);
    ASSERT_EQ(peaks.size(), 3u);
    const double bin = p.delay_axis[1];
    std::vector<double> delays;
    for (std::size_t k = 0; k < peaks.size(); ++k)
    {
        delays.push_back(p.delay_axis[peaks[k].row]);
        if (k > 0)
        {
            EXPECT_LE(peaks[k].level_db, peaks[k - 1].level_db); // listed strongest first
        }
    }
    std::sort(delays.begin(), delays.end());
    EXPECT_NEAR(delays[0], 30e-9, bin * 1.001);
    EXPECT_NEAR(delays[1], 35e-9, bin * 1.001);
    EXPECT_NEAR(delays[2], 40e-9, bin * 1.001);
}

TEST(PadpMa, SinglePathAndCoincidentPaths)
{
    const MaCfr one = gen_ma_cfr({PathComponent::from_db(-4.0, 30.0, 150.0, 15e-9)}, {11, 11, 0.5}, band);
    const Padp p = padp_ma(one, 30.0, linear_axis(140.0, 160.0, 1.0), 4);
    auto peaks = find_peaks(p, 30.0);
    ASSERT_GE(peaks.size(), 1u);
    EXPECT_NEAR(p.delay_axis[peaks[0].row], 30e-9, 1e-18);
    EXPECT_NEAR(peaks[0].level_db, -4.0, 1e-9);

    const MaCfr two = gen_ma_cfr({PathComponent::from_db(0.0, 30.0, 150.0, 15e-9), PathComponent::from_db(-6.0, 30.0, 150.0, 15e-9)},
                                 {11, 11, 0.5}, band);
    const Padp q = padp_ma(two, 30.0, linear_axis(140.0, 160.0, 1.0), 4);
    peaks = find_peaks(q, 13.0, 48, 3);
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_NEAR(q.delay_axis[peaks[0].row], 30e-9, 1e-18);
}

TEST(PadpMa, MatchesDirectDoubleSum)
{
    Rng rng(13);
    const FrequencyGrid g = FrequencyGrid::from_band(26e9, 2e9, 40);
    const PathSet paths{{rng.phasor(), {50.0, 120.0}, 3e-9}, {0.4 * rng.phasor(), {20.0, 200.0}, 7.3e-9}};
    const MaCfr h = gen_ma_cfr(paths, {9, 7, 0.5}, g);
    const std::vector<double> phi = linear_axis(100.0, 220.0, 12.0);
    const Padp p = padp_ma(h, 20.0, phi, 2);
    for (std::size_t d = 0; d < p.delay_axis.size(); d += 7)
        for (std::size_t c = 0; c < phi.size(); ++c)
            EXPECT_LT(std::abs(p.at(d, c) - testkit::direct_padp_ma(h, {20.0, phi[c]}, p.delay_axis[d])), 1e-9);
}

TEST(PredictTerms, TwoPathLevels)
{
    const auto terms = predict_ma_terms(fig4_paths());
    ASSERT_EQ(terms.size(), 4u);
    std::vector<double> levels;
    for (const auto &t : terms)
        levels.push_back(t.level_db);
    std::sort(levels.begin(), levels.end());
    EXPECT_NEAR(levels[0], -12.0, 1e-9);
    EXPECT_NEAR(levels[1], -6.0, 1e-9);
    EXPECT_NEAR(levels[2], -6.0, 1e-9);
    EXPECT_NEAR(levels[3], 0.0, 1e-9);
}

TEST(PredictTerms, SinglePath)
{
    const auto terms = predict_ma_terms({PathComponent::from_db(-7.0, 20.0, 30.0, 11e-9)});
    ASSERT_EQ(terms.size(), 1u);
    EXPECT_TRUE(terms[0].is_true());
    EXPECT_NEAR(terms[0].level_db, -7.0, 1e-12);
    EXPECT_NEAR(terms[0].delay_s, 22e-9, 1e-20);
    EXPECT_THROW(predict_ma_terms({}), ValidationError);
}

TEST(PredictTerms, ThreePathDelays)
{
    const auto terms = predict_ma_terms({PathComponent::from_db(0.0, 60.0, 120.0, 12e-9), PathComponent::from_db(-10.0, 30.0, 140.0, 40e-9),
                                         PathComponent::from_db(-15.0, 80.0, 220.0, 13e-9)});
    ASSERT_EQ(terms.size(), 9u);
    for (const double d : {24.0, 80.0, 26.0, 52.0, 25.0, 53.0})
        EXPECT_TRUE(std::any_of(terms.begin(), terms.end(), [&](const PredictedTerm &t) { return std::abs(t.delay_s * 1e9 - d) < 1e-9; }))
            << d << " ns";
    for (const auto &t : terms)
        if (t.is_true())
        {
            EXPECT_NEAR(t.delay_s, 2.0 * (t.origin.first == 0 ? 12e-9 : t.origin.first == 1 ? 40e-9 : 13e-9), 1e-20);
        }
}

TEST(FindPeaks, ConstantGridGivesFirstPoint)
{
    const std::vector<double> flat(12, -3.0);
    const auto peaks = find_peaks(flat, 3, 4, 10.0, 1, 1);
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_EQ(peaks[0].row, 0u);
    EXPECT_EQ(peaks[0].col, 0u);
}

TEST(FindPeaks, SingleBumpAboveFloor)
{
    std::vector<double> g(50, -40.0);
    g[17] = -30.0;
    const auto peaks = find_peaks(g, 5, 10, 6.0, 1, 1);
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_EQ(peaks[0].row * 10 + peaks[0].col, 17u);
}

TEST(FindPeaks, SortingRangeAndSeparation)
{
    std::vector<double> g(100, -50.0);
    g[2 * 10 + 2] = 0.0;
    g[2 * 10 + 4] = -1.0; // two cells from the strongest: suppressed with separation 3
    g[7 * 10 + 7] = -5.0;
    g[5 * 10 + 0] = -25.0; // below the range
    auto peaks = find_peaks(g, 10, 10, 20.0, 3, 3);
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_EQ(peaks[0].level_db, 0.0);
    EXPECT_EQ(peaks[1].level_db, -5.0);
    peaks = find_peaks(g, 10, 10, 20.0, 1, 1);
    EXPECT_EQ(peaks.size(), 3u);
    EXPECT_THROW(find_peaks(std::vector<double>{}, 0, 0, 1.0, 1, 1), ValidationError);
}

TEST(FindPeaks, PadpTieBreakLowestDelayThenPhi)
{
    Padp p;
    p.kind = ArrayKind::ura;
    p.phi_axis = {10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0};
    p.delay_axis = linear_axis(0.0, 9e-9, 1e-9);
    p.values.assign(p.phi_axis.size() * p.delay_axis.size(), 0.01);
    p.values[6 * 7 + 1] = 1.0;
    p.values[2 * 7 + 5] = 1.0;
    p.values[2 * 7 + 1] = cdouble(0.0, 1.0);
    const Peak s = strongest(p);
    EXPECT_EQ(s.row, 2u);
    EXPECT_EQ(s.col, 1u);
    const auto peaks = find_peaks(p, 10.0, 1, 1);
    ASSERT_EQ(peaks.size(), 3u);
    EXPECT_EQ(peaks[0].row, 2u);
    EXPECT_EQ(peaks[0].col, 1u);
    EXPECT_EQ(peaks[1].row, 2u);
    EXPECT_EQ(peaks[2].row, 6u);
}

TEST(Strongest, AllZeroThrows)
{
    BeamPattern b;
    b.grid = {AngularGrid::Kind::theta_phi, {0.0, 1.0}, {0.0, 1.0}};
    b.values.assign(4, 0.0);
    EXPECT_THROW(strongest(b), NumericalError);
}

TEST(Levels, Conventions)
{
    EXPECT_NEAR(level_db(ArrayKind::ura, 0.1), -20.0, 1e-12);
    EXPECT_NEAR(level_db(ArrayKind::ma, 0.1), -10.0, 1e-12);
}
