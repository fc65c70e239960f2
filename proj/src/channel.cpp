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

#include "masound/channel.hpp"

#include <cmath>
#include <random>

namespace masound
{
    const char *layout_name(CfrLayout layout)
    {
        switch (layout)
        {
        case CfrLayout::ura:
            return "ura";
        case CfrLayout::ma_x:
            return "ma_x";
        case CfrLayout::ma_y:
            return "ma_y";
        }
        return "?";
    }

    CfrLayout layout_from_name(const std::string &name)
    {
        if (name == "ura")
            return CfrLayout::ura;
        if (name == "ma_x")
            return CfrLayout::ma_x;
        if (name == "ma_y")
            return CfrLayout::ma_y;
        throw ValidationError("unknown CFR layout '" + name + "'");
    }

    void CfrSet::validate() const
    {
        if (n_elem_x == 0 || n_elem_y == 0 || n_elem_x % 2 == 0 || n_elem_y % 2 == 0)
            throw ValidationError("CFR element counts must be odd and positive");
        if (layout == CfrLayout::ma_x && n_elem_y != 1)
            throw ValidationError("ma_x layout requires n_elem_y == 1");
        if (layout == CfrLayout::ma_y && n_elem_x != 1)
            throw ValidationError("ma_y layout requires n_elem_x == 1");
        if (std::size_t(values.rows()) != elements() || std::size_t(values.cols()) != freqs.size())
            throw ValidationError("CFR matrix is " + std::to_string(values.rows()) + " x " + std::to_string(values.cols()) +
                                  ", expected " + std::to_string(elements()) + " x " + std::to_string(freqs.size()));
        if (!(spacing_x > 0.0) || !(spacing_y > 0.0))
            throw ValidationError("CFR element spacing must be positive");
    }

    void MaCfr::validate() const
    {
        x.validate();
        y.validate();
        if (x.layout != CfrLayout::ma_x || y.layout != CfrLayout::ma_y)
            throw ValidationError("MA CFR pair must be (ma_x, ma_y)");
        if (!(x.freqs == y.freqs))
            throw ValidationError("MA sub-array CFRs use different frequency grids");
        if (!(x.phase == y.phase))
            throw ValidationError("MA sub-array CFRs use different phase references");
    }

    void check_paths(const PathSet &paths, const FrequencyGrid &freqs)
    {
        const double limit = 0.5 * freqs.unambiguous_delay();
        for (const auto &p : paths)
        {
            p.validate();
            if (p.delay_s >= limit)
                throw ValidationError("delay aliasing: path delay " + std::to_string(p.delay_s * 1e9) +
                                      " ns must stay below half the unambiguous range (" + std::to_string(limit * 1e9) + " ns)");
        }
    }

    CfrSet synthesize_like(const CfrSet &like, const PathSet &paths)
    {
        CfrSet out = like;
        const std::size_t L = like.freqs.size();
        const std::size_t E = like.elements();
        out.values = CMatrix::Zero(Eigen::Index(E), Eigen::Index(L));

        std::vector<cdouble> delay_phase(L);
        for (const auto &p : paths)
        {
            const UvPoint uv = uv_map(p.direction);
            for (std::size_t l = 0; l < L; ++l)
                delay_phase[l] = p.amplitude * std::polar(1.0, -2.0 * pi * like.freqs.at(l) * p.delay_s);

            for (std::size_t e = 0; e < E; ++e)
            {
                const double path_len = double(like.index_x(e)) * like.spacing_x * uv.u +
                                        double(like.index_y(e)) * like.spacing_y * uv.v;
                if (like.phase.narrowband)
                {
                    const cdouble sp = std::polar(1.0, like.phase.wavenumber(0.0) * path_len);
                    for (std::size_t l = 0; l < L; ++l)
                        out.values(Eigen::Index(e), Eigen::Index(l)) += delay_phase[l] * sp;
                }
                else
                {
                    for (std::size_t l = 0; l < L; ++l)
                        out.values(Eigen::Index(e), Eigen::Index(l)) +=
                            delay_phase[l] * std::polar(1.0, like.phase.wavenumber(like.freqs.at(l)) * path_len);
                }
            }
        }
        return out;
    }

    CfrSet gen_ura_cfr(const PathSet &paths, const UraGeometry &geometry, const FrequencyGrid &freqs, const PhaseModel &phase)
    {
        geometry.validate();
        check_paths(paths, freqs);
        CfrSet like;
        like.layout = CfrLayout::ura;
        like.n_elem_x = geometry.m_count;
        like.n_elem_y = geometry.n_count;
        like.spacing_x = geometry.dx;
        like.spacing_y = geometry.dy;
        like.phase = phase;
        like.freqs = freqs;
        return synthesize_like(like, paths);
    }

    MaCfr gen_ma_cfr(const PathSet &paths, const MaGeometry &geometry, const FrequencyGrid &freqs, const PhaseModel &phase)
    {
        geometry.validate();
        check_paths(paths, freqs);
        CfrSet x;
        x.layout = CfrLayout::ma_x;
        x.n_elem_x = geometry.x_count;
        x.n_elem_y = 1;
        x.spacing_x = x.spacing_y = geometry.d;
        x.phase = phase;
        x.freqs = freqs;

        CfrSet y = x;
        y.layout = CfrLayout::ma_y;
        y.n_elem_x = 1;
        y.n_elem_y = geometry.y_count;

        return {synthesize_like(x, paths), synthesize_like(y, paths)};
    }

    static double noise_sigma(double signal_energy, std::size_t entries, std::optional<double> snr_db)
    {
        if (!std::isfinite(*snr_db))
            throw ValidationError("snr_db must be finite (or +inf / absent for no noise)");
        if (!(signal_energy > 0.0))
            throw ValidationError("cannot set an SNR on an all-zero CFR");
        const double per_entry = signal_energy / double(entries) / std::pow(10.0, *snr_db / 10.0);
        return std::sqrt(per_entry / 2.0); // per real dimension
    }

    static void add_gaussian(CfrSet &cfr, double sigma, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g(0.0, sigma);
        for (Eigen::Index r = 0; r < cfr.values.rows(); ++r)
            for (Eigen::Index c = 0; c < cfr.values.cols(); ++c)
            {
                const double re = g(rng);
                const double im = g(rng);
                cfr.values(r, c) += cdouble(re, im);
            }
    }

    static bool no_noise(std::optional<double> snr_db)
    {
        return !snr_db.has_value() || (std::isinf(*snr_db) && *snr_db > 0.0);
    }

    CfrSet add_noise(const CfrSet &cfr, std::optional<double> snr_db, std::uint64_t seed)
    {
        if (no_noise(snr_db))
            return cfr;
        const double sigma = noise_sigma(cfr.energy(), std::size_t(cfr.values.size()), snr_db);
        CfrSet out = cfr;
        std::mt19937_64 rng(seed);
        add_gaussian(out, sigma, rng);
        return out;
    }

    MaCfr add_noise(const MaCfr &cfr, std::optional<double> snr_db, std::uint64_t seed)
    {
        if (no_noise(snr_db))
            return cfr;
        const double sigma = noise_sigma(cfr.energy(), std::size_t(cfr.x.values.size() + cfr.y.values.size()), snr_db);
        MaCfr out = cfr;
        std::mt19937_64 rng(seed);
        add_gaussian(out.x, sigma, rng);
        add_gaussian(out.y, sigma, rng);
        return out;
    }
} // namespace masound
