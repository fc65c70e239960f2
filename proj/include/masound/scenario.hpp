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

#ifndef MASOUND_SCENARIO_HPP
#define MASOUND_SCENARIO_HPP

#include "masound/sic.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace masound
{
    // Spatial taper as written in a scenario; resolved against a geometry on demand
    struct TaperSpec
    {
        enum class Kind
        {
            uniform,
            chebyshev,
            custom
        };

        Kind kind = Kind::uniform;
        double sidelobe_db = 30.0;
        std::vector<double> x, y;       // custom URA weights
        std::vector<double> ma_x, ma_y; // custom MA weights; default: auto-convolved x, y

        // Weights for an M x N URA
        Taper for_ura(std::size_t m_count, std::size_t n_count) const;

        // MA weights emulating the URA taper: the self-convolution of the (count+1)/2-element taper
        Taper for_ma(std::size_t x_count, std::size_t y_count) const;
    };

    struct PatternSpec
    {
        double steer_u = 0.0;
        double steer_v = 0.0;
        std::size_t lattice = 512;
        TaperSpec taper;
    };

    struct BeamscanSpec
    {
        std::optional<double> theta_deg; // PADP elevation; default: strongest path, else 90
        std::size_t lattice = 512;
        std::optional<double> max_delay_ns; // PADP rows written up to this delay
        TaperSpec taper;
        double peak_range_db = 20.0;
        std::size_t peak_separation = 3;          // cells
        std::optional<double> padp_separation_ns; // delay separation of PADP peaks; default: peak_separation bins
    };

    struct NoiseSpec
    {
        std::optional<double> snr_db;
        std::uint64_t seed = 1;
    };

    struct Scenario
    {
        std::string name = "scenario";
        FrequencyGrid freqs;
        PhaseModel phase;
        std::optional<UraGeometry> ura;
        std::optional<MaGeometry> ma;
        PathSet paths;
        EstimatorConfig estimator; // holds the scan grid
        PatternSpec pattern;
        BeamscanSpec beamscan;
        NoiseSpec noise;

        const ScanGrid &scan() const { return estimator.scan; }
        void validate() const;
    };

    // Parse and validate; ValidationError messages carry the line (syntax) or field path (content)
    Scenario parse_scenario(const std::filesystem::path &file);
    Scenario parse_scenario_text(const std::string &text, const std::string &source = "<scenario>");

    // Fully expanded form with every default spelled out; parses back to the same scenario
    nlohmann::ordered_json dump_scenario(const Scenario &scenario);
} // namespace masound

#endif
