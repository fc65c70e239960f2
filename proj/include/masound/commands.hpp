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

#ifndef MASOUND_COMMANDS_HPP
#define MASOUND_COMMANDS_HPP

#include "masound/scenario.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace masound
{
    struct CommandOptions
    {
        std::filesystem::path out = ".";
        std::optional<std::uint64_t> seed;          // overrides noise.seed
        std::optional<std::filesystem::path> input; // directory with cfr_*.csv; synthesized when absent
        bool quiet = false;
        std::ostream *log = nullptr; // progress / summary lines unless quiet
    };

    // Fixed output file names
    inline constexpr const char *cfr_ura_file = "cfr_ura.csv";
    inline constexpr const char *cfr_ma_x_file = "cfr_ma_x.csv";
    inline constexpr const char *cfr_ma_y_file = "cfr_ma_y.csv";

    struct SynthPatternResult
    {
        bool checked = false;          // URA-equivalent excitations, so the patterns must agree
        bool equivalent = true;
        double max_deviation_db = 0.0; // over the full lattice, levels clamped at -300 dB
        std::string note;
    };

    struct BeamPeak
    {
        double u = 0.0;
        double v = 0.0;
        double level_db = 0.0;
    };

    struct PadpPeak
    {
        double phi_deg = 0.0;
        double delay_s = 0.0;
        double level_db = 0.0;
    };

    struct ArrayScan
    {
        ArrayKind kind = ArrayKind::ura;
        double theta_deg = 0.0;
        std::vector<BeamPeak> beam_peaks;
        std::vector<PadpPeak> padp_peaks;
    };

    struct BeamscanResult
    {
        std::vector<ArrayScan> arrays;
        const ArrayScan *find(ArrayKind kind) const;
    };

    struct ComparisonRow
    {
        std::size_t index = 0;
        std::optional<EstimatedPath> ura;
        std::optional<EstimatedPath> ma;

        bool matched() const { return ura && ma; }
        double delay_error_ns() const { return (ma->delay_s - ura->delay_s) * 1e9; }
        double azimuth_error_deg() const { return ma->direction.phi_deg - ura->direction.phi_deg; }
        double power_error_db() const { return ma->amplitude_db - ura->amplitude_db; }
    };

    struct CompareResult
    {
        EstimationReport ura;
        EstimationReport ma;
        std::vector<ComparisonRow> rows;
        bool count_mismatch = false;
    };

    // CFRs of the scenario: read from options.input when set, otherwise synthesized (plus noise)
    std::optional<CfrSet> load_ura_cfr(const Scenario &scenario, const CommandOptions &options);
    std::optional<MaCfr> load_ma_cfr(const Scenario &scenario, const CommandOptions &options);

    SynthPatternResult cmd_synth_pattern(const Scenario &scenario, const CommandOptions &options);
    void cmd_simulate(const Scenario &scenario, const CommandOptions &options);
    BeamscanResult cmd_beamscan(const Scenario &scenario, const CommandOptions &options);
    EstimationReport cmd_estimate(const Scenario &scenario, const CommandOptions &options);
    CompareResult cmd_compare(const Scenario &scenario, const CommandOptions &options);

    // Pair URA and MA estimates greedily by normalized (delay, azimuth, elevation) distance
    std::vector<ComparisonRow> align_paths(const std::vector<EstimatedPath> &ura, const std::vector<EstimatedPath> &ma);
} // namespace masound

#endif
