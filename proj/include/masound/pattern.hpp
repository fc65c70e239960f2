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

#ifndef MASOUND_PATTERN_HPP
#define MASOUND_PATTERN_HPP

#include "masound/core.hpp"

#include <span>
#include <vector>

namespace masound
{
    using cldouble = std::complex<long double>;

    // Complex excitation along one axis, element i sits at signed index i - (n-1)/2.
    // Weights are kept in extended precision so that pattern synthesis (tapers, steering,
    // self-convolution) does not lose digits near pattern nulls; operator[] gives the double value.
    class ExcitationVector
    {
    public:
        ExcitationVector() : ExcitationVector(std::vector<cldouble>{cldouble(1.0L)}) {}
        explicit ExcitationVector(std::vector<cdouble> weights); // throws ValidationError unless length is odd
        explicit ExcitationVector(std::vector<cldouble> weights);
        static ExcitationVector uniform(std::size_t n);
        static ExcitationVector real(const std::vector<double> &weights);

        std::size_t size() const { return w_.size(); }
        const cdouble &operator[](std::size_t i) const { return rounded_[i]; }
        std::span<const cdouble> weights() const { return rounded_; }
        const cldouble &precise(std::size_t i) const { return w_[i]; }

        // Sum of |w|, used as beam normalization
        double abs_sum() const { return double(abs_sum_); }
        long double precise_abs_sum() const { return abs_sum_; }

    private:
        std::vector<cldouble> w_;
        std::vector<cdouble> rounded_;
        long double abs_sum_ = 0.0L;
    };

    // Dolph-Chebyshev taper, real, symmetric, unit peak. n must be odd.
    ExcitationVector chebyshev_taper(std::size_t n, double sidelobe_db);

    // Coefficients of the squared polynomial (full linear convolution of w with itself)
    ExcitationVector auto_convolve(const ExcitationVector &w);

    // Multiply w_m by exp(-j 2 pi spacing m u0)
    ExcitationVector steer(const ExcitationVector &w, double u0, double spacing);

    bool check_conjugate_symmetry(const ExcitationVector &w, double tol = 1e-12);

    // Narrowband line factor  sum_m w_m exp(j 2 pi m spacing u) / sum|w|
    cdouble line_factor(const ExcitationVector &w, double spacing, double u);

    // Uniform (u, v) lattice; both axes include their end points
    struct UvLattice
    {
        std::vector<double> u_axis;
        std::vector<double> v_axis;

        // n x n points over [-1, 1]^2
        static UvLattice square(std::size_t n = 512);
        double u_step() const { return u_axis.size() > 1 ? u_axis[1] - u_axis[0] : 0.0; }
        double v_step() const { return v_axis.size() > 1 ? v_axis[1] - v_axis[0] : 0.0; }
    };

    // Power pattern over a (u, v) lattice, row-major with u as the row index.
    struct PowerPattern
    {
        UvLattice lattice;
        std::vector<double> values; // real part of P
        double max_imag = 0.0;      // largest |Im P| seen (0 for conjugate-symmetric excitations)
        double peak = 0.0;
        UvPoint peak_location;

        double at(std::size_t iu, std::size_t iv) const { return values[iu * lattice.v_axis.size() + iv]; }
        bool visible(std::size_t iu, std::size_t iv) const { return UvPoint{lattice.u_axis[iu], lattice.v_axis[iv]}.visible(); }
    };

    // P = |D|^2 with D = sum_mn A_mn exp(j 2 pi (m dx u + n dy v)) / (sum|wx| sum|wy|), A = wx wy^T
    PowerPattern ura_power_pattern(const ExcitationVector &wx, const ExcitationVector &wy,
                                   const UraGeometry &geometry, const UvLattice &lattice);

    // P = Dx(u) Dy(v), each sub-array factor normalized by its excitation sum
    PowerPattern ma_power_pattern(const ExcitationVector &wx, const ExcitationVector &wy,
                                  const MaGeometry &geometry, const UvLattice &lattice);
} // namespace masound

#endif
