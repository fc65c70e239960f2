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

#include "support.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#ifndef MASOUND_SCENARIO_DIR
#error "MASOUND_SCENARIO_DIR must point at the bundled scenarios"
#endif

namespace masound::testkit
{
    std::size_t Rng::odd(std::size_t lo, std::size_t hi)
    {
        const long a = long(lo | 1), b = long(hi % 2 ? hi : hi - 1);
        return std::size_t(a + 2 * integer(0, (b - a) / 2));
    }

    cdouble direct_beam(const CfrSet &cfr, const UvPoint &uv, std::size_t l, const ExcitationVector *wx, const ExcitationVector *wy)
    {
        const double k = cfr.phase.wavenumber(cfr.freqs.at(l));
        double norm_x = double(cfr.n_elem_x), norm_y = double(cfr.n_elem_y);
        if (wx)
            norm_x = wx->abs_sum();
        if (wy)
            norm_y = wy->abs_sum();
        cdouble acc = 0.0;
        for (std::size_t ix = 0; ix < cfr.n_elem_x; ++ix)
            for (std::size_t iy = 0; iy < cfr.n_elem_y; ++iy)
            {
                const double m = double(signed_index(ix, cfr.n_elem_x)), n = double(signed_index(iy, cfr.n_elem_y));
                const cdouble a = std::polar(1.0, k * (m * cfr.spacing_x * uv.u + n * cfr.spacing_y * uv.v));
                const cdouble w = (wx ? (*wx)[ix] : 1.0) * (wy ? (*wy)[iy] : 1.0);
                acc += std::conj(a) * w * cfr.values(Eigen::Index(cfr.element_row(ix, iy)), Eigen::Index(l));
            }
        return acc / (norm_x * norm_y);
    }

    namespace
    {
        template <typename BeamAt>
        cdouble direct_padp(const FrequencyGrid &freqs, double tau, BeamAt beam_at)
        {
            cdouble acc = 0.0;
            for (std::size_t l = 0; l < freqs.size(); ++l)
                acc += beam_at(l) * std::polar(1.0, 2.0 * pi * freqs.at(l) * tau);
            return acc / double(freqs.size());
        }
    } // namespace

    cdouble direct_padp_ura(const CfrSet &cfr, const Direction &dir, double tau)
    {
        const UvPoint uv = uv_map(dir);
        return direct_padp(cfr.freqs, tau, [&](std::size_t l) { return direct_beam(cfr, uv, l); });
    }

    cdouble direct_padp_ma(const MaCfr &cfr, const Direction &dir, double tau)
    {
        const UvPoint uv = uv_map(dir);
        return direct_padp(cfr.x.freqs, tau, [&](std::size_t l) { return direct_beam(cfr.x, uv, l) * direct_beam(cfr.y, uv, l); });
    }

    PathComponent random_grid_path(Rng &rng, const ScanGrid &scan, double delay_step, double max_delay, double power_db)
    {
        const double theta = scan.theta_axis[std::size_t(rng.integer(0, long(scan.theta_axis.size()) - 1))];
        const double phi = scan.phi_axis[std::size_t(rng.integer(0, long(scan.phi_axis.size()) - 1))];
        const double delay = delay_step * double(rng.integer(0, long(std::floor(max_delay / delay_step))));
        return PathComponent::from_db(power_db, theta, phi, delay, rng.uniform(-180.0, 180.0));
    }

    std::optional<double> term_maximum_level(const MaCfr &cfr, double f_hz, double u, double v, double max_offset, double half_width,
                                             std::size_t cells)
    {
        const double step = 2.0 * half_width / double(cells);
        UvLattice patch;
        for (std::size_t i = 0; i <= cells; ++i)
        {
            patch.u_axis.push_back(u - half_width + step * double(i));
            patch.v_axis.push_back(v - half_width + step * double(i));
        }
        const BeamPattern beam = cbf_ma(cfr, AngularGrid::from_lattice(patch), f_hz);
        const Peak p = strongest(beam);
        if (p.row == 0 || p.col == 0 || p.row == cells || p.col == cells)
            return std::nullopt;
        if (std::abs(patch.u_axis[p.row] - u) > max_offset || std::abs(patch.v_axis[p.col] - v) > max_offset)
            return std::nullopt;
        return p.level_db;
    }

    std::filesystem::path scratch_dir(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / ("masound_tests_" + name);
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        return dir;
    }

    std::string read_file(const std::filesystem::path &file)
    {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::filesystem::path scenario_file(const std::string &stem)
    {
        return std::filesystem::path(MASOUND_SCENARIO_DIR) / (stem + ".json");
    }

    double phi_distance(double a, double b)
    {
        const double d = std::fmod(std::abs(a - b), 360.0);
        return std::min(d, 360.0 - d);
    }
} // namespace masound::testkit
