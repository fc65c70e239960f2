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

#include "masound/pattern.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace masound;

namespace
{
    // |sum_m w_m e^{j m psi}| over psi in [0, pi], normalized to the value at psi = 0
    std::vector<double> line_pattern_db(const ExcitationVector &w, std::size_t samples)
    {
        std::vector<double> out(samples);
        cdouble peak = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            peak += w[i];
        for (std::size_t s = 0; s < samples; ++s)
        {
            const double psi = pi * double(s) / double(samples - 1);
            cdouble acc = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                acc += w[i] * std::polar(1.0, psi * double(signed_index(i, w.size())));
            out[s] = 20.0 * std::log10(std::abs(acc) / std::abs(peak));
        }
        return out;
    }

    // Highest level after the main lobe's first null
    double max_sidelobe_db(const ExcitationVector &w)
    {
        const auto p = line_pattern_db(w, 40001);
        std::size_t i = 1;
        while (i + 1 < p.size() && p[i + 1] < p[i])
            ++i;
        return *std::max_element(p.begin() + long(i), p.end());
    }

    std::vector<cdouble> convolve(const ExcitationVector &w)
    {
        std::vector<cdouble> out(2 * w.size() - 1, 0.0);
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = 0; j < w.size(); ++j)
                out[i + j] += w[i] * w[j];
        return out;
    }
} // namespace

TEST(ChebyshevTaper, SingleElement)
{
    const ExcitationVector w = chebyshev_taper(1, 25.0);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0], cdouble(1.0));
}

TEST(ChebyshevTaper, FiveElementsMatchPolynomialExpansion)
{
    // T4(x0 cos(psi/2)) expanded in cos(k psi): a0 = 3x^4 - 4x^2 + 1, a1 = 2x^4 - 2x^2, a2 = x^4 / 2
    const double R = std::pow(10.0, 30.0 / 20.0);
    const double x0 = std::cosh(std::acosh(R) / 4.0);
    const double x2 = x0 * x0, x4 = x2 * x2;
    const double a0 = 3 * x4 - 4 * x2 + 1, a1 = 2 * x4 - 2 * x2, a2 = x4 / 2;
    const double peak = std::max({a0, a1, a2});
    const double expected[5] = {a2 / peak, a1 / peak, a0 / peak, a1 / peak, a2 / peak};

    const ExcitationVector w = chebyshev_taper(5, 30.0);
    ASSERT_EQ(w.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i)
    {
        EXPECT_NEAR(w[i].real(), expected[i], 1e-10);
        EXPECT_EQ(w[i].imag(), 0.0);
    }
}

TEST(ChebyshevTaper, EquirippleSidelobes)
{
    for (const std::size_t n : {21u, 41u, 101u})
    {
        const ExcitationVector w = chebyshev_taper(n, 30.0);
        ASSERT_EQ(w.size(), n);
        double peak = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            EXPECT_GT(w[i].real(), 0.0);
            EXPECT_NEAR(w[i].real(), w[n - 1 - i].real(), 1e-12);
            peak = std::max(peak, w[i].real());
        }
        EXPECT_DOUBLE_EQ(peak, 1.0);
        EXPECT_NEAR(max_sidelobe_db(w), -30.0, 0.1) << "n = " << n;
    }
}

TEST(ChebyshevTaper, RejectsBadArguments)
{
    EXPECT_THROW(chebyshev_taper(4, 30.0), ValidationError);
    EXPECT_THROW(chebyshev_taper(5, 0.0), ValidationError);
}

TEST(AutoConvolve, SmallCases)
{
    EXPECT_EQ(auto_convolve(ExcitationVector::uniform(1)).size(), 1u);
    EXPECT_EQ(auto_convolve(ExcitationVector::uniform(1))[0], cdouble(1.0));

    const ExcitationVector w = auto_convolve(ExcitationVector::uniform(3));
    const double expected[5] = {1, 2, 3, 2, 1};
    ASSERT_EQ(w.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i)
        EXPECT_EQ(w[i], cdouble(expected[i]));
}

TEST(AutoConvolve, ChebyshevMatchesDirectConvolution)
{
    const ExcitationVector w = chebyshev_taper(21, 30.0);
    const ExcitationVector c = auto_convolve(w);
    const auto ref = convolve(w);
    ASSERT_EQ(c.size(), 41u);
    for (std::size_t i = 0; i < 41; ++i)
        EXPECT_NEAR(std::abs(c[i] - ref[i]), 0.0, 1e-13);
}

TEST(AutoConvolve, FactorIsSquareOfInputFactor)
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<cdouble> raw(std::size_t(2 * (trial % 6) + 1));
        for (auto &x : raw)
            x = {U(gen), U(gen)};
        const ExcitationVector w(raw);
        const ExcitationVector c = auto_convolve(w);
        EXPECT_EQ(c.size(), 2 * w.size() - 1);
        for (int s = 0; s < 20; ++s)
        {
            const double u = U(gen);
            const cdouble f = line_factor(w, 0.5, u) * w.abs_sum();
            const cdouble g = line_factor(c, 0.5, u) * c.abs_sum();
            EXPECT_LE(std::abs(g - f * f), 1e-10 * std::max(1.0, std::norm(f)));
        }
    }
}

TEST(Steer, ZeroIsIdentity)
{
    const ExcitationVector w = chebyshev_taper(7, 30.0);
    const ExcitationVector s = steer(w, 0.0, 0.5);
    for (std::size_t i = 0; i < w.size(); ++i)
        EXPECT_EQ(s[i], w[i]);
}

TEST(Steer, PhaseRamp)
{
    const ExcitationVector s = steer(ExcitationVector::uniform(3), 0.5, 0.5);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(std::abs(s[i]), 1.0, 1e-15);
    EXPECT_NEAR(std::arg(s[1]), 0.0, 1e-15);
    EXPECT_NEAR(std::arg(s[2]) - std::arg(s[1]), -pi / 2, 1e-12);
    EXPECT_NEAR(std::arg(s[1]) - std::arg(s[0]), -pi / 2, 1e-12);
    EXPECT_THROW(steer(ExcitationVector::uniform(3), 1.5, 0.5), ValidationError);
}

TEST(ConjugateSymmetry, Cases)
{
    const ExcitationVector cheb = chebyshev_taper(21, 30.0);
    EXPECT_TRUE(check_conjugate_symmetry(cheb));
    EXPECT_FALSE(check_conjugate_symmetry(ExcitationVector(std::vector<cdouble>{1.0, 0.0, cdouble(0.0, 1.0)})));
    EXPECT_TRUE(check_conjugate_symmetry(steer(cheb, 0.37, 0.5)));
    EXPECT_TRUE(check_conjugate_symmetry(auto_convolve(steer(cheb, -0.61, 0.5))));
}

TEST(ExcitationVectorTest, RejectsEvenLength)
{
    EXPECT_THROW(ExcitationVector(std::vector<cdouble>{1.0, 1.0}), ValidationError);
    EXPECT_THROW(ExcitationVector(std::vector<cdouble>{}), ValidationError);
}

TEST(UraPowerPattern, SingleElementIsFlat)
{
    const PowerPattern p = ura_power_pattern(ExcitationVector::uniform(1), ExcitationVector::uniform(1), {1, 1, 0.5, 0.5},
                                             UvLattice::square(33));
    for (const double v : p.values)
        EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(UraPowerPattern, UniformPeakAtBoresight)
{
    const UvLattice lattice = UvLattice::square(511);
    ASSERT_EQ(lattice.u_axis[255], 0.0);
    const PowerPattern p = ura_power_pattern(ExcitationVector::uniform(21), ExcitationVector::uniform(21), {21, 21, 0.5, 0.5}, lattice);
    EXPECT_NEAR(p.peak, 1.0, 1e-12);
    EXPECT_NEAR(p.peak_location.u, 0.0, 1e-15);
    EXPECT_NEAR(p.peak_location.v, 0.0, 1e-15);
    EXPECT_NEAR(p.at(255, 255), 1.0, 1e-12);
}

TEST(UraPowerPattern, SteeredPeakLocation)
{
    const UvLattice lattice = UvLattice::square(512);
    const ExcitationVector cheb = chebyshev_taper(21, 30.0);
    const PowerPattern p = ura_power_pattern(steer(cheb, 0.5, 0.5), steer(cheb, 0.1, 0.5), {21, 21, 0.5, 0.5}, lattice);
    EXPECT_LE(std::abs(p.peak_location.u - 0.5), lattice.u_step());
    EXPECT_LE(std::abs(p.peak_location.v - 0.1), lattice.v_step());
    // About 11.3 deg azimuth and 30.8 deg elevation
    const Direction d = uv_unmap(p.peak_location);
    EXPECT_NEAR(d.phi_deg, 11.3, 0.5);
    EXPECT_NEAR(d.theta_deg, 30.8, 0.5);
}

TEST(UraPowerPattern, DimensionMismatch)
{
    EXPECT_THROW(ura_power_pattern(ExcitationVector::uniform(3), ExcitationVector::uniform(5), {5, 5, 0.5, 0.5}, UvLattice::square(8)),
                 ValidationError);
    EXPECT_THROW(ma_power_pattern(ExcitationVector::uniform(3), ExcitationVector::uniform(5), {5, 5, 0.5}, UvLattice::square(8)),
                 ValidationError);
}

TEST(MaPowerPattern, SingleElementIsFlat)
{
    const PowerPattern p = ma_power_pattern(ExcitationVector::uniform(1), ExcitationVector::uniform(1), {1, 1, 0.5}, UvLattice::square(17));
    for (const double v : p.values)
        EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(MaPowerPattern, UniformEquivalence)
{
    const UvLattice lattice = UvLattice::square(256);
    const ExcitationVector u21 = ExcitationVector::uniform(21);
    const PowerPattern ura = ura_power_pattern(u21, u21, {21, 21, 0.5, 0.5}, lattice);
    const PowerPattern ma = ma_power_pattern(auto_convolve(u21), auto_convolve(u21), {41, 41, 0.5}, lattice);
    double worst = 0.0;
    for (std::size_t k = 0; k < ura.values.size(); ++k)
        worst = std::max(worst, std::abs(ura.values[k] - ma.values[k]));
    EXPECT_LT(worst, 1e-9);
}

TEST(MaPowerPattern, ChebyshevSteeredEquivalence)
{
    const UvLattice lattice = UvLattice::square(512);
    const ExcitationVector cheb = chebyshev_taper(21, 30.0);
    const ExcitationVector wx = steer(cheb, 0.5, 0.5), wy = steer(cheb, 0.1, 0.5);
    const PowerPattern ura = ura_power_pattern(wx, wy, {21, 21, 0.5, 0.5}, lattice);
    const PowerPattern ma = ma_power_pattern(auto_convolve(wx), auto_convolve(wy), {41, 41, 0.5}, lattice);
    double worst_db = 0.0;
    for (std::size_t k = 0; k < ura.values.size(); ++k)
        worst_db = std::max(worst_db, std::abs(10.0 * std::log10(ura.values[k]) - 10.0 * std::log10(ma.values[k])));
    EXPECT_LT(worst_db, 1e-6);
    EXPECT_LT(ma.max_imag, 1e-12);
}

// Random conjugate-symmetric pairs (real symmetric taper times a steering ramp)
TEST(PatternProperties, EquivalenceNonNegativityAndSteering)
{
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> U(0.05, 1.0), S(-0.7, 0.7);
    const UvLattice lattice = UvLattice::square(65);
    for (int trial = 0; trial < 200; ++trial)
    {
        auto symmetric = [&](std::size_t n) {
            std::vector<double> w(n);
            for (std::size_t i = 0; i <= n / 2; ++i)
                w[i] = w[n - 1 - i] = U(gen);
            return ExcitationVector::real(w);
        };
        const std::size_t M = 2 * std::size_t(trial % 4) + 1, N = 2 * std::size_t((trial / 4) % 4) + 1;
        const double u0 = S(gen), v0 = S(gen);
        const ExcitationVector wx = steer(symmetric(M), u0, 0.5), wy = steer(symmetric(N), v0, 0.5);
        ASSERT_TRUE(check_conjugate_symmetry(wx));

        const PowerPattern ura = ura_power_pattern(wx, wy, {M, N, 0.5, 0.5}, lattice);
        const PowerPattern ma = ma_power_pattern(auto_convolve(wx), auto_convolve(wy), {2 * M - 1, 2 * N - 1, 0.5}, lattice);
        for (std::size_t k = 0; k < ura.values.size(); ++k)
        {
            EXPECT_LE(std::abs(ura.values[k] - ma.values[k]), 1e-9 * std::max(ura.values[k], 1e-300) + 1e-18);
            EXPECT_GE(ma.values[k], -1e-12);
        }
        EXPECT_LT(ma.max_imag, 1e-12);

        // A uniform 11 x 11 array steered to a visible point peaks within one cell of it
        const PowerPattern steered = ura_power_pattern(steer(ExcitationVector::uniform(11), u0, 0.5),
                                                       steer(ExcitationVector::uniform(11), v0, 0.5), {11, 11, 0.5, 0.5}, lattice);
        if (u0 * u0 + v0 * v0 <= 1.0)
        {
            EXPECT_LE(std::abs(steered.peak_location.u - u0), lattice.u_step());
            EXPECT_LE(std::abs(steered.peak_location.v - v0), lattice.v_step());
        }
    }
}
