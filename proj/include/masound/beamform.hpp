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

#ifndef MASOUND_BEAMFORM_HPP
#define MASOUND_BEAMFORM_HPP

#include "masound/channel.hpp"
#include "masound/pattern.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace masound
{
    enum class ArrayKind
    {
        ura,
        ma
    };

    // Display level of a beam / PADP magnitude.
    // URA values are fields (20 log10), MA values are products of two fields (10 log10),
    // so a single path shows its own power in both.
    inline double level_db(ArrayKind kind, double magnitude)
    {
        return kind == ArrayKind::ura ? to_db20(magnitude) : to_db10(magnitude);
    }

    // Scan directions: either a (theta, phi) grid in degrees or a (u, v) lattice.
    // Row index runs over axis0 (theta or u), column index over axis1 (phi or v).
    struct AngularGrid
    {
        enum class Kind
        {
            theta_phi,
            uv
        };

        Kind kind = Kind::theta_phi;
        std::vector<double> axis0;
        std::vector<double> axis1;

        static AngularGrid from_scan(const ScanGrid &scan) { return {Kind::theta_phi, scan.theta_axis, scan.phi_axis}; }
        static AngularGrid from_lattice(const UvLattice &lattice) { return {Kind::uv, lattice.u_axis, lattice.v_axis}; }

        std::size_t rows() const { return axis0.size(); }
        std::size_t cols() const { return axis1.size(); }
        UvPoint uv(std::size_t i, std::size_t j) const;
    };

    struct BeamPattern
    {
        AngularGrid grid;
        double frequency_hz = 0.0;
        ArrayKind kind = ArrayKind::ura;
        std::vector<cdouble> values; // row-major rows x cols

        const cdouble &at(std::size_t i, std::size_t j) const { return values[i * grid.cols() + j]; }
        std::vector<double> levels_db() const;
    };

    // Power angular delay profile at a fixed elevation; values are delay-major
    // (index = delay_bin * phi_axis.size() + phi_index).
    struct Padp
    {
        ArrayKind kind = ArrayKind::ura;
        double theta_deg = 0.0;
        std::vector<double> phi_axis;
        std::vector<double> delay_axis;
        std::vector<cdouble> values;

        const cdouble &at(std::size_t delay_bin, std::size_t phi_index) const { return values[delay_bin * phi_axis.size() + phi_index]; }
        std::vector<double> levels_db() const;
    };

    // Spatial weights folded into the CBF. URA weights are wx wy^T; MA weights apply per sub-array.
    struct Taper
    {
        ExcitationVector x;
        ExcitationVector y;
    };

    // B(theta, phi) = sum_mn conj(a_mn) w_mn H_mn(f) / sum|w|
    BeamPattern cbf_ura(const CfrSet &cfr, const AngularGrid &grid, double f_hz, const std::optional<Taper> &taper = std::nullopt);

    // B = Bx(u) By(v), each sub-array sum normalized by its weight sum
    BeamPattern cbf_ma(const MaCfr &cfr, const AngularGrid &grid, double f_hz, const std::optional<Taper> &taper = std::nullopt);

    // Beam pattern sequence over all frequencies toward the directions (theta, phi_axis):
    // rows = phi, cols = frequency. These are the inputs of the delay transform.
    CMatrix beam_spectra_ura(const CfrSet &cfr, double theta_deg, const std::vector<double> &phi_axis, const std::optional<Taper> &taper = std::nullopt);
    CMatrix beam_spectra_ma(const MaCfr &cfr, double theta_deg, const std::vector<double> &phi_axis, const std::optional<Taper> &taper = std::nullopt);

    // One MA sub-array on its own (taper.x for ma_x, taper.y for ma_y)
    CMatrix beam_spectra_subarray(const CfrSet &sub, double theta_deg, const std::vector<double> &phi_axis, const std::optional<Taper> &taper = std::nullopt);

    // b(tau, phi) = (1/L) sum_f B(f, theta, phi) exp(+j 2 pi f tau)
    Padp padp_ura(const CfrSet &cfr, double theta_deg, const std::vector<double> &phi_axis, std::size_t pad_factor,
                  const std::optional<Taper> &taper = std::nullopt);
    Padp padp_ma(const MaCfr &cfr, double theta_deg, const std::vector<double> &phi_axis, std::size_t pad_factor,
                 const std::optional<Taper> &taper = std::nullopt);

    // One of the K^2 MA phasor products: (u_i, v_j) at delay tau_i + tau_j
    struct PredictedTerm
    {
        double u = 0.0;
        double v = 0.0;
        double delay_s = 0.0;
        double level_db = 0.0; // (P_i + P_j) / 2
        std::pair<std::size_t, std::size_t> origin;

        bool is_true() const { return origin.first == origin.second; }
    };

    std::vector<PredictedTerm> predict_ma_terms(const PathSet &paths);

    struct Peak
    {
        std::size_t row = 0;
        std::size_t col = 0;
        double level_db = 0.0;
    };

    // Which axis decides ties first
    enum class TieOrder
    {
        row_then_col,
        col_then_row
    };

    // Local maxima (plateaus count once) above (global max - dynamic_range_db), sorted by
    // descending level; maxima within min_sep cells (per axis) of a stronger accepted peak are dropped.
    std::vector<Peak> find_peaks(const std::vector<double> &levels_db, std::size_t rows, std::size_t cols,
                                 double dynamic_range_db, std::size_t min_sep_rows, std::size_t min_sep_cols,
                                 TieOrder order = TieOrder::row_then_col);

    // PADP peaks: ties go to the lowest delay, then the lowest phi
    std::vector<Peak> find_peaks(const Padp &padp, double dynamic_range_db, std::size_t min_sep_delay = 3, std::size_t min_sep_phi = 3);

    // Beam peaks: ties go to the lowest phi (column), then the lowest theta (row)
    std::vector<Peak> find_peaks(const BeamPattern &beam, double dynamic_range_db, std::size_t min_sep = 3);

    // Global maximum of |values| with relative tie tolerance; throws NumericalError if the grid is all zero
    Peak strongest(const BeamPattern &beam);
    Peak strongest(const Padp &padp);

    // Local-maximum test on a magnitude grid over the 8-neighbourhood (>= neighbours)
    bool is_local_max(const std::vector<double> &values, std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);
} // namespace masound

#endif
