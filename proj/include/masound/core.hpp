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

#ifndef MASOUND_CORE_HPP
#define MASOUND_CORE_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace masound
{
    using cdouble = std::complex<double>;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double deg2rad = pi / 180.0;
    inline constexpr double rad2deg = 180.0 / pi;

    // Error categories. The CLI maps them to exit codes 2 / 3 / 4.
    class ValidationError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Arrival direction in degrees. theta is measured from the array normal (broadside),
    // phi is the azimuth in the array plane, counted from the x-axis.
    struct Direction
    {
        double theta_deg = 0.0; // [0, 90]
        double phi_deg = 0.0;   // [0, 360)

        bool valid() const;
        void validate() const; // throws ValidationError
        bool operator==(const Direction &) const = default;
    };

    // Direction cosines
    struct UvPoint
    {
        double u = 0.0;
        double v = 0.0;

        bool visible() const { return u * u + v * v <= 1.0; }
        bool operator==(const UvPoint &) const = default;
    };

    UvPoint uv_map(const Direction &direction);

    // Inverse of uv_map. phi is folded to [0, 360) and set to 0 at boresight.
    // Throws ValidationError outside the visible region.
    Direction uv_unmap(const UvPoint &p);

    // One propagation path
    struct PathComponent
    {
        cdouble amplitude{1.0, 0.0}; // complex linear amplitude
        Direction direction;
        double delay_s = 0.0;

        // Convenience: amplitude from power in dB (20*log10|a|) and phase in degrees
        static PathComponent from_db(double power_db, double theta_deg, double phi_deg, double delay_s, double phase_deg = 0.0);

        double power_db() const;
        void validate() const;
        bool operator==(const PathComponent &) const = default;
    };

    // Uniform frequency grid f_1 ... f_L (both ends included)
    class FrequencyGrid
    {
    public:
        FrequencyGrid() = default;
        FrequencyGrid(double f_start_hz, double f_stop_hz, std::size_t n_points);

        // L points spaced bandwidth / L apart, starting at f_start. The occupied band
        // (n_points * spacing) then equals `bandwidth_hz` and the delay resolution is 1 / bandwidth.
        static FrequencyGrid from_band(double f_start_hz, double bandwidth_hz, std::size_t n_points);

        double f_start() const { return f_start_; }
        double f_stop() const { return f_stop_; }
        std::size_t size() const { return n_; }
        double spacing() const { return (f_stop_ - f_start_) / double(n_ - 1); }
        double at(std::size_t i) const { return f_start_ + double(i) * spacing(); }
        double center() const { return 0.5 * (f_start_ + f_stop_); }

        // Index of the frequency point used for single-frequency beam patterns
        std::size_t center_index() const { return n_ / 2; }

        // n_points * spacing; delay resolution is its inverse
        double occupied_bandwidth() const { return double(n_) * spacing(); }

        // 1 / spacing
        double unambiguous_delay() const { return 1.0 / spacing(); }

        // Index of f if f lies on the grid (relative tolerance 1e-9 of the spacing), else throws ValidationError
        std::size_t index_of(double f_hz) const;

        std::vector<double> values() const;

        bool operator==(const FrequencyGrid &) const = default;

    private:
        double f_start_ = 0.0;
        double f_stop_ = 1.0;
        std::size_t n_ = 2;
    };

    // Spatial phase model. Element spacings are given in wavelengths at `ref_freq_hz`.
    // With `narrowband` set, the spatial phase ignores the actual frequency (single-lambda form),
    // otherwise the electrical spacing scales with f / ref_freq_hz.
    struct PhaseModel
    {
        double ref_freq_hz = 1.0;
        bool narrowband = true;

        // 2*pi * (electrical spacing per wavelength-unit) at frequency f
        double wavenumber(double f_hz) const { return narrowband ? 2.0 * pi : 2.0 * pi * f_hz / ref_freq_hz; }
        bool operator==(const PhaseModel &) const = default;
    };

    // URA of M x N elements; signed indices m in [-(M-1)/2, (M-1)/2]
    struct UraGeometry
    {
        std::size_t m_count = 1;
        std::size_t n_count = 1;
        double dx = 0.5; // wavelengths
        double dy = 0.5;

        void validate() const;
        std::size_t elements() const { return m_count * n_count; }
        bool operator==(const UraGeometry &) const = default;
    };

    // Multiplicative array: x-axis sub-array (m', 0) and y-axis sub-array (0, n').
    // The two sub-arrays are independent element sets (the shared center is counted twice).
    struct MaGeometry
    {
        std::size_t x_count = 1;
        std::size_t y_count = 1;
        double d = 0.5; // wavelengths

        void validate() const;
        std::size_t elements() const { return x_count + y_count; }

        // MA with 2M-1 and 2N-1 elements mimicking a URA of M x N at the same spacing
        static MaGeometry equivalent_to(const UraGeometry &ura);
        bool operator==(const MaGeometry &) const = default;
    };

    // Signed element index of position i in a line of `count` elements
    inline long signed_index(std::size_t i, std::size_t count) { return long(i) - long(count - 1) / 2; }

    // Inclusive axis start, start+step, ..., stop
    std::vector<double> linear_axis(double start, double stop, double step);

    // Delay bins for the padded inverse transform: n_points * pad_factor bins starting at 0,
    // bin width 1 / (pad_factor * n_points * spacing).
    std::vector<double> delay_axis(const FrequencyGrid &freqs, std::size_t pad_factor);

    // Peak separability of the delay transform (independent of padding)
    inline double delay_resolution(const FrequencyGrid &freqs) { return 1.0 / freqs.occupied_bandwidth(); }

    struct ScanGrid
    {
        std::vector<double> theta_axis; // degrees
        std::vector<double> phi_axis;   // degrees
        std::vector<double> delay_axis; // seconds

        // theta 0..90, phi 90..270 at 1 deg, delays with pad factor 4
        static ScanGrid make_default(const FrequencyGrid &freqs, std::size_t pad_factor = 4);

        void validate() const;
    };

    double to_db20(double magnitude);
    double to_db10(double magnitude);
} // namespace masound

#endif
