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

#include "masound/core.hpp"

#include <cmath>
#include <limits>

namespace masound
{
    bool Direction::valid() const
    {
        return std::isfinite(theta_deg) && std::isfinite(phi_deg) &&
               theta_deg >= 0.0 && theta_deg <= 90.0 && phi_deg >= 0.0 && phi_deg < 360.0;
    }

    void Direction::validate() const
    {
        if (!valid())
            throw ValidationError("direction out of range: theta=" + std::to_string(theta_deg) +
                                  " (expected [0, 90]), phi=" + std::to_string(phi_deg) + " (expected [0, 360))");
    }

    UvPoint uv_map(const Direction &direction)
    {
        const double st = std::sin(direction.theta_deg * deg2rad);
        const double phi = direction.phi_deg * deg2rad;
        return {st * std::cos(phi), st * std::sin(phi)};
    }

    Direction uv_unmap(const UvPoint &p)
    {
        const double r2 = p.u * p.u + p.v * p.v;
        if (!(r2 <= 1.0))
            throw ValidationError("uv point outside the visible region (u^2 + v^2 > 1)");
        if (r2 == 0.0)
            return {0.0, 0.0};

        const double theta = std::asin(std::min(1.0, std::sqrt(r2))) * rad2deg;
        double phi = std::atan2(p.v, p.u) * rad2deg;
        if (phi < 0.0)
            phi += 360.0;
        if (phi >= 360.0)
            phi -= 360.0;
        return {theta, phi};
    }

    PathComponent PathComponent::from_db(double power_db, double theta_deg, double phi_deg, double delay_s, double phase_deg)
    {
        PathComponent p;
        p.amplitude = std::polar(std::pow(10.0, power_db / 20.0), phase_deg * deg2rad);
        p.direction = {theta_deg, phi_deg};
        p.delay_s = delay_s;
        return p;
    }

    double PathComponent::power_db() const
    {
        return to_db20(std::abs(amplitude));
    }

    void PathComponent::validate() const
    {
        direction.validate();
        if (!std::isfinite(delay_s) || delay_s < 0.0)
            throw ValidationError("path delay must be finite and >= 0");
        if (!(std::abs(amplitude) > 0.0) || !std::isfinite(std::abs(amplitude)))
            throw ValidationError("path amplitude must be finite and nonzero");
    }

    FrequencyGrid::FrequencyGrid(double f_start_hz, double f_stop_hz, std::size_t n_points)
        : f_start_(f_start_hz), f_stop_(f_stop_hz), n_(n_points)
    {
        if (!std::isfinite(f_start_hz) || !std::isfinite(f_stop_hz) || !(f_stop_hz > f_start_hz))
            throw ValidationError("frequency grid requires f_stop > f_start");
        if (n_points < 2)
            throw ValidationError("frequency grid requires at least 2 points");
    }

    FrequencyGrid FrequencyGrid::from_band(double f_start_hz, double bandwidth_hz, std::size_t n_points)
    {
        if (!(bandwidth_hz > 0.0) || n_points < 2)
            throw ValidationError("frequency band requires bandwidth > 0 and at least 2 points");
        const double df = bandwidth_hz / double(n_points);
        return FrequencyGrid(f_start_hz, f_start_hz + df * double(n_points - 1), n_points);
    }

    std::size_t FrequencyGrid::index_of(double f_hz) const
    {
        const double pos = (f_hz - f_start_) / spacing();
        const double idx = std::round(pos);
        if (idx < 0.0 || idx > double(n_ - 1) || std::abs(pos - idx) > 1e-9)
            throw ValidationError("frequency " + std::to_string(f_hz) + " Hz is not on the frequency grid");
        return std::size_t(idx);
    }

    std::vector<double> FrequencyGrid::values() const
    {
        std::vector<double> f(n_);
        for (std::size_t i = 0; i < n_; ++i)
            f[i] = at(i);
        return f;
    }

    void UraGeometry::validate() const
    {
        if (m_count == 0 || n_count == 0 || m_count % 2 == 0 || n_count % 2 == 0)
            throw ValidationError("URA element counts must be odd and positive");
        if (!(dx > 0.0) || !(dy > 0.0))
            throw ValidationError("URA element spacing must be positive");
    }

    void MaGeometry::validate() const
    {
        if (x_count == 0 || y_count == 0 || x_count % 2 == 0 || y_count % 2 == 0)
            throw ValidationError("MA sub-array element counts must be odd and positive");
        if (!(d > 0.0))
            throw ValidationError("MA element spacing must be positive");
    }

    MaGeometry MaGeometry::equivalent_to(const UraGeometry &ura)
    {
        if (ura.dx != ura.dy)
            throw ValidationError("URA-equivalent MA requires dx == dy");
        return {2 * ura.m_count - 1, 2 * ura.n_count - 1, ura.dx};
    }

    std::vector<double> linear_axis(double start, double stop, double step)
    {
        if (!(step > 0.0) || !(stop >= start))
            throw ValidationError("axis requires step > 0 and stop >= start");
        const auto n = std::size_t(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> axis(n);
        for (std::size_t i = 0; i < n; ++i)
            axis[i] = start + double(i) * step;
        return axis;
    }

    std::vector<double> delay_axis(const FrequencyGrid &freqs, std::size_t pad_factor)
    {
        if (pad_factor < 1)
            throw ValidationError("pad_factor must be >= 1");
        const std::size_t n = freqs.size() * pad_factor;
        const double bin = 1.0 / (double(n) * freqs.spacing());
        std::vector<double> tau(n);
        for (std::size_t i = 0; i < n; ++i)
            tau[i] = double(i) * bin;
        return tau;
    }

    ScanGrid ScanGrid::make_default(const FrequencyGrid &freqs, std::size_t pad_factor)
    {
        return {linear_axis(0.0, 90.0, 1.0), linear_axis(90.0, 270.0, 1.0), masound::delay_axis(freqs, pad_factor)};
    }

    static void check_increasing(const std::vector<double> &axis, const char *name)
    {
        if (axis.empty())
            throw ValidationError(std::string(name) + " axis is empty");
        for (std::size_t i = 1; i < axis.size(); ++i)
            if (!(axis[i] > axis[i - 1]))
                throw ValidationError(std::string(name) + " axis must be strictly increasing");
    }

    void ScanGrid::validate() const
    {
        check_increasing(theta_axis, "theta");
        check_increasing(phi_axis, "phi");
        check_increasing(delay_axis, "delay");
        if (theta_axis.front() < 0.0 || theta_axis.back() > 90.0)
            throw ValidationError("theta axis must lie within [0, 90] deg");
        if (phi_axis.front() < 0.0 || phi_axis.back() >= 360.0)
            throw ValidationError("phi axis must lie within [0, 360) deg");
    }

    double to_db20(double magnitude)
    {
        return magnitude > 0.0 ? 20.0 * std::log10(magnitude) : -std::numeric_limits<double>::infinity();
    }

    double to_db10(double magnitude)
    {
        return magnitude > 0.0 ? 10.0 * std::log10(magnitude) : -std::numeric_limits<double>::infinity();
    }
} // namespace masound
