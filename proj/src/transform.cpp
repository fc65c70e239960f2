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

#include "masound/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <memory>

namespace masound
{
    namespace
    {
        struct FftwFree
        {
            void operator()(fftw_complex *p) const { fftw_free(p); }
        };
        using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

        struct FftwPlan
        {
            fftw_plan plan = nullptr;
            ~FftwPlan()
            {
                if (plan)
                    fftw_destroy_plan(plan);
            }
        };

        // In-place batched 1-D DFTs of length n over `rows` contiguous rows
        void batched_dft(fftw_complex *data, std::size_t rows, std::size_t n, int sign)
        {
            if (rows == 0)
                return;
            int len = int(n);
            FftwPlan p;
            p.plan = fftw_plan_many_dft(1, &len, int(rows), data, nullptr, 1, len, data, nullptr, 1, len, sign, FFTW_ESTIMATE);
            if (!p.plan)
                throw NumericalError("FFTW planning failed");
            fftw_execute(p.plan);
        }

        FftwBuffer alloc(std::size_t count)
        {
            FftwBuffer b(fftw_alloc_complex(count));
            if (!b)
                throw NumericalError("FFTW allocation failed");
            return b;
        }
    } // namespace

    DelayTransform::DelayTransform(const FrequencyGrid &freqs, std::size_t pad_factor)
        : freqs_(freqs), L_(freqs.size()), P_(pad_factor), N_(freqs.size() * pad_factor)
    {
        if (pad_factor < 1)
            throw ValidationError("pad_factor must be >= 1");
        tau_ = delay_axis(freqs, pad_factor);
        bin_ = 1.0 / (double(N_) * freqs.spacing());
        start_phase_.resize(N_);
        for (std::size_t k = 0; k < N_; ++k)
        {
            // f_1 tau_k in cycles, reduced before the phase is formed
            const double cycles = std::fmod(freqs.f_start() * tau_[k], 1.0);
            start_phase_[k] = std::polar(1.0, 2.0 * pi * cycles);
        }
    }

    std::vector<cdouble> DelayTransform::inverse(std::span<const cdouble> spectrum) const
    {
        if (spectrum.size() != L_)
            throw ValidationError("spectrum length does not match the frequency grid");
        CMatrix row(1, Eigen::Index(L_));
        for (std::size_t l = 0; l < L_; ++l)
            row(0, Eigen::Index(l)) = spectrum[l];
        const CMatrix out = inverse_rows(row);
        return std::vector<cdouble>(out.data(), out.data() + N_);
    }

    CMatrix DelayTransform::inverse_rows(const CMatrix &spectra) const
    {
        if (std::size_t(spectra.cols()) != L_)
            throw ValidationError("spectrum length does not match the frequency grid");
        const std::size_t rows = std::size_t(spectra.rows());
        auto buf = alloc(rows * N_);
        std::memset(buf.get(), 0, sizeof(fftw_complex) * rows * N_);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t l = 0; l < L_; ++l)
            {
                const cdouble x = spectra(Eigen::Index(r), Eigen::Index(l));
                buf[r * N_ + l][0] = x.real();
                buf[r * N_ + l][1] = x.imag();
            }
        batched_dft(buf.get(), rows, N_, FFTW_BACKWARD); // exp(+j ...)

        CMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(N_));
        const double scale = 1.0 / double(L_);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < N_; ++k)
                out(Eigen::Index(r), Eigen::Index(k)) = cdouble(buf[r * N_ + k][0], buf[r * N_ + k][1]) * start_phase_[k] * scale;
        return out;
    }

    CMatrix DelayTransform::forward_rows(const CMatrix &profiles) const
    {
        if (std::size_t(profiles.cols()) != N_)
            throw ValidationError("delay profile length does not match the delay axis");
        const std::size_t rows = std::size_t(profiles.rows());
        auto buf = alloc(rows * N_);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < N_; ++k)
            {
                const cdouble x = profiles(Eigen::Index(r), Eigen::Index(k)) * std::conj(start_phase_[k]);
                buf[r * N_ + k][0] = x.real();
                buf[r * N_ + k][1] = x.imag();
            }
        batched_dft(buf.get(), rows, N_, FFTW_FORWARD); // exp(-j ...)

        CMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(L_));
        const double scale = 1.0 / double(P_);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t l = 0; l < L_; ++l)
                out(Eigen::Index(r), Eigen::Index(l)) = cdouble(buf[r * N_ + l][0], buf[r * N_ + l][1]) * scale;
        return out;
    }

    cdouble DelayTransform::inverse_at(std::span<const cdouble> spectrum, double tau) const
    {
        if (spectrum.size() != L_)
            throw ValidationError("spectrum length does not match the frequency grid");
        cdouble acc = 0.0;
        for (std::size_t l = 0; l < L_; ++l)
        {
            const double cycles = std::fmod(freqs_.at(l) * tau, 1.0);
            acc += spectrum[l] * std::polar(1.0, 2.0 * pi * cycles);
        }
        return acc / double(L_);
    }
} // namespace masound
