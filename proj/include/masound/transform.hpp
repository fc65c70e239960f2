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

#ifndef MASOUND_TRANSFORM_HPP
#define MASOUND_TRANSFORM_HPP

#include "masound/channel.hpp"

#include <span>
#include <vector>

namespace masound
{
    // Frequency <-> delay transform over a uniform grid, zero-padded by `pad_factor`.
    //
    //   inverse:  b(tau_k) = (1/L) sum_l X(f_l) exp(+j 2 pi f_l tau_k),   tau_k = k / (P L df)
    //   forward:  X(f_l)   = (1/P) sum_k b(tau_k) exp(-j 2 pi f_l tau_k),  l < L
    //
    // A unit exponential exp(-j 2 pi f tau0) with tau0 on a bin maps to exactly 1 at that bin,
    // and forward(inverse(X)) == X.
    class DelayTransform
    {
    public:
        DelayTransform(const FrequencyGrid &freqs, std::size_t pad_factor);

        std::size_t freq_points() const { return L_; }
        std::size_t delay_bins() const { return N_; }
        std::size_t pad_factor() const { return P_; }
        double bin_width() const { return bin_; }
        const std::vector<double> &delays() const { return tau_; }

        std::vector<cdouble> inverse(std::span<const cdouble> spectrum) const;

        // Row-wise transforms of element x frequency / element x delay matrices
        CMatrix inverse_rows(const CMatrix &spectra) const;
        CMatrix forward_rows(const CMatrix &profiles) const;

        // Direct evaluation of the inverse sum at an arbitrary delay
        cdouble inverse_at(std::span<const cdouble> spectrum, double tau) const;

    private:
        FrequencyGrid freqs_;
        std::size_t L_, P_, N_;
        double bin_;
        std::vector<double> tau_;
        std::vector<cdouble> start_phase_; // exp(+j 2 pi f_1 tau_k)
    };
} // namespace masound

#endif
