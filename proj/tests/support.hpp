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

// Shared helpers for the unit, property and acceptance suites: brute-force oracles,
// random instance generators and small filesystem utilities.

#ifndef MASOUND_TESTS_SUPPORT_HPP
#define MASOUND_TESTS_SUPPORT_HPP

#include "masound/beamform.hpp"
#include "masound/sic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace masound::testkit
{
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : gen_(seed) {}

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
        long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }
        std::size_t odd(std::size_t lo, std::size_t hi); // odd value in [lo, hi]
        cdouble phasor() { return std::polar(1.0, uniform(-pi, pi)); }
        std::mt19937_64 &engine() { return gen_; }

    private:
        std::mt19937_64 gen_;
    };

    // Weighted element sum toward `uv` at frequency column l, evaluated element by element
    cdouble direct_beam(const CfrSet &cfr, const UvPoint &uv, std::size_t l, const ExcitationVector *wx = nullptr,
                        const ExcitationVector *wy = nullptr);

    // (1/L) sum_l B(f_l) exp(+j 2 pi f_l tau) with B from direct_beam
    cdouble direct_padp_ura(const CfrSet &cfr, const Direction &dir, double tau);
    cdouble direct_padp_ma(const MaCfr &cfr, const Direction &dir, double tau);

    // Random path with theta, phi drawn from the axes of `scan` and a delay that is a multiple of `delay_step`
    PathComponent random_grid_path(Rng &rng, const ScanGrid &scan, double delay_step, double max_delay, double power_db);

    // Level (MA display dB) of the beam maximum found on a fine (u, v) patch around (u, v), or nothing
    // when that maximum is more than max_offset away from (u, v) on either axis or sits on the patch border.
    std::optional<double> term_maximum_level(const MaCfr &cfr, double f_hz, double u, double v, double max_offset = 0.003,
                                             double half_width = 0.02, std::size_t cells = 80);

    std::filesystem::path scratch_dir(const std::string &name);
    std::string read_file(const std::filesystem::path &file);

    // Bundled scenario file by stem, e.g. "table1"
    std::filesystem::path scenario_file(const std::string &stem);

    // Angular distance on the phi circle
    double phi_distance(double a, double b);
} // namespace masound::testkit

#endif
