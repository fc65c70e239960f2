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

#ifndef MASOUND_CHANNEL_HPP
#define MASOUND_CHANNEL_HPP

#include "masound/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace masound
{
    using CMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    enum class CfrLayout
    {
        ura,  // M x N elements
        ma_x, // M' x 1, elements (m', 0)
        ma_y  // 1 x N', elements (0, n')
    };

    const char *layout_name(CfrLayout layout);
    CfrLayout layout_from_name(const std::string &name); // throws ValidationError

    // Per-element channel frequency responses.
    // values(element, frequency) with element = ix * n_elem_y + iy and ix, iy the
    // zero-based positions along x and y (signed index = position - (count-1)/2).
    struct CfrSet
    {
        CfrLayout layout = CfrLayout::ura;
        std::size_t n_elem_x = 1;
        std::size_t n_elem_y = 1;
        double spacing_x = 0.5; // wavelengths at phase.ref_freq_hz
        double spacing_y = 0.5;
        PhaseModel phase;
        FrequencyGrid freqs;
        CMatrix values;

        std::size_t elements() const { return n_elem_x * n_elem_y; }
        std::size_t element_row(std::size_t ix, std::size_t iy) const { return ix * n_elem_y + iy; }
        long index_x(std::size_t row) const { return signed_index(row / n_elem_y, n_elem_x); }
        long index_y(std::size_t row) const { return signed_index(row % n_elem_y, n_elem_y); }

        // Layout/shape consistency; throws ValidationError
        void validate() const;

        double energy() const { return values.squaredNorm(); }
    };

    // MA measurement: both sub-arrays on a shared frequency grid
    struct MaCfr
    {
        CfrSet x;
        CfrSet y;

        void validate() const;
        double energy() const { return x.energy() + y.energy(); }
    };

    using PathSet = std::vector<PathComponent>;

    // Rejects paths whose delay reaches half the unambiguous delay range of `freqs`
    // (the MA doubles delays), and invalid path parameters.
    void check_paths(const PathSet &paths, const FrequencyGrid &freqs);

    // Default phase model: single-lambda spatial phase referenced to the grid center
    inline PhaseModel default_phase(const FrequencyGrid &freqs) { return {freqs.center(), true}; }

    // H(m,n,f) = sum_k a_k exp(-j 2 pi f tau_k) exp(j k(f) (m dx u_k + n dy v_k))
    CfrSet gen_ura_cfr(const PathSet &paths, const UraGeometry &geometry, const FrequencyGrid &freqs,
                       const PhaseModel &phase);
    inline CfrSet gen_ura_cfr(const PathSet &paths, const UraGeometry &geometry, const FrequencyGrid &freqs)
    {
        return gen_ura_cfr(paths, geometry, freqs, default_phase(freqs));
    }

    MaCfr gen_ma_cfr(const PathSet &paths, const MaGeometry &geometry, const FrequencyGrid &freqs,
                     const PhaseModel &phase);
    inline MaCfr gen_ma_cfr(const PathSet &paths, const MaGeometry &geometry, const FrequencyGrid &freqs)
    {
        return gen_ma_cfr(paths, geometry, freqs, default_phase(freqs));
    }

    // Regenerate paths on the same layout, geometry and grid as `like` (no aliasing check)
    CfrSet synthesize_like(const CfrSet &like, const PathSet &paths);

    // Circularly-symmetric complex Gaussian noise with total signal / total noise power
    // equal to 10^(snr_db/10). An empty or +inf snr returns the input unchanged.
    // Throws ValidationError for an all-zero input or a non-finite (other than +inf) snr.
    CfrSet add_noise(const CfrSet &cfr, std::optional<double> snr_db, std::uint64_t seed);

    // Both sub-arrays share one noise level derived from their joint signal power
    MaCfr add_noise(const MaCfr &cfr, std::optional<double> snr_db, std::uint64_t seed);
} // namespace masound

#endif
