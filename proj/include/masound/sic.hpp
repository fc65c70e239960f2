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

#ifndef MASOUND_SIC_HPP
#define MASOUND_SIC_HPP

#include "masound/beamform.hpp"

#include <optional>
#include <vector>

namespace masound
{
    struct EstimatorConfig
    {
        double epsilon_db = 30.0;          // dynamic range below the first path
        std::size_t max_iterations = 10;   // cap on accepted paths
        ScanGrid scan;                     // theta/phi axes; delay axis follows from the CFR grid
        std::optional<double> gate_db;     // delay-gate threshold, defaults to epsilon_db
        std::size_t pad_factor = 4;
        std::optional<Taper> taper;
        bool keep_snapshots = false;       // store the residual PADP of every iteration
        // PADP maxima examined per iteration. Cross terms of paths that share a direction add
        // coherently and can outgrow true paths; each candidate is gated and the one with the
        // largest extracted amplitude is taken. 1 keeps only the global maximum.
        std::size_t candidate_peaks = 8;

        double gate_threshold_db() const { return gate_db.value_or(epsilon_db); }
        void validate() const;
    };

    struct EstimatedPath
    {
        cdouble amplitude;
        double amplitude_db = 0.0; // 20 log10 |amplitude|
        Direction direction;
        double delay_s = 0.0;
        std::size_t iteration = 0; // 1-based
        double residual_energy_after = 0.0;

        PathComponent as_component() const { return {amplitude, direction, delay_s}; }
    };

    enum class StopReason
    {
        dynamic_range,
        max_iterations
    };

    const char *stop_reason_name(StopReason reason);

    struct IterationDiagnostics
    {
        std::size_t iteration = 0;
        double beam_peak_db = 0.0;
        double padp_peak_db = 0.0;
        double theta_deg = 0.0;
        double phi_deg = 0.0;
        double peak_delay_s = 0.0; // location in the profile searched (doubled for the MA)
        double gate_start_s = 0.0;
        double gate_stop_s = 0.0;
        std::size_t gated_bins = 0;
        double candidate_db = 0.0;
        std::size_t candidates_tried = 1;
        std::size_t candidate_rank = 0; // 0 when the global PADP maximum was taken
        bool accepted = false;
        bool joint_estimate = false; // gate holds more than one resolvable path
    };

    struct EstimationReport
    {
        std::vector<EstimatedPath> paths;
        StopReason stop_reason = StopReason::dynamic_range;
        std::vector<IterationDiagnostics> diagnostics;
        std::vector<Padp> snapshots; // residual PADP at the detected elevation, one per iteration

        PathSet as_paths() const;
    };

    // Binary delay gate, one row per element
    struct DelayGate
    {
        std::size_t rows = 0;
        std::size_t bins = 0;
        std::vector<unsigned char> mask; // rows x bins

        bool at(std::size_t r, std::size_t k) const { return mask[r * bins + k] != 0; }
        std::size_t count(std::size_t r) const;
    };

    // Direction of the largest |B| on the scan grid
    Direction detect_strongest(const BeamPattern &beam);

    struct PadpRefinement
    {
        double phi_deg = 0.0;
        double delay_s = 0.0;      // half the peak delay for the MA, the peak delay for the URA
        double peak_delay_s = 0.0; // where the peak sits on the delay axis
        Peak peak;
    };

    // Peak of the (phi, delay) plane. The MA maps a path at tau to 2 tau, so the delay is halved.
    PadpRefinement refine_on_padp(const Padp &padp);

    // s(tau) = 1 where |h(tau)| >= 10^(-threshold/20) max|h|, per row
    DelayGate build_label_vector(const CMatrix &synthetic_cir, double threshold_db);

    CMatrix extract_path_cir(const CMatrix &residual_cir, const DelayGate &gate);

    // |alpha| = sqrt(|b_MA(2 tau, theta, phi)|) on the extracted CFR. The phase is arg(b) / 2,
    // with the sign chosen to agree with the x sub-array delay profile at tau.
    cdouble estimate_power(const MaCfr &extracted, const Direction &direction, double delay_s,
                           const std::optional<Taper> &taper = std::nullopt);

    MaCfr subtract_path(const MaCfr &residual, const PathComponent &path);
    CfrSet subtract_path(const CfrSet &residual, const PathComponent &path);

    // Successive interference cancellation on an MA measurement
    EstimationReport run_sic(const MaCfr &cfr, const EstimatorConfig &config);

    // Reference pipeline on a URA: CBF peak picking with CLEAN-style subtraction and the same stop rule
    EstimationReport estimate_ura_paths(const CfrSet &cfr, const EstimatorConfig &config);
} // namespace masound

#endif
