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

#include "masound/pattern.hpp"

#include <algorithm>
#include <cmath>

namespace masound
{
    ExcitationVector::ExcitationVector(std::vector<cldouble> weights) : w_(std::move(weights))
    {
        if (w_.empty() || w_.size() % 2 == 0)
            throw ValidationError("excitation vector length must be odd");
        rounded_.reserve(w_.size());
        for (const auto &w : w_)
        {
            rounded_.emplace_back(double(w.real()), double(w.imag()));
            abs_sum_ += std::abs(w);
        }
    }

    ExcitationVector::ExcitationVector(std::vector<cdouble> weights)
        : ExcitationVector(std::vector<cldouble>(weights.begin(), weights.end()))
    {
    }

    ExcitationVector ExcitationVector::uniform(std::size_t n)
    {
        return ExcitationVector(std::vector<cldouble>(n, cldouble(1.0L)));
    }

    ExcitationVector ExcitationVector::real(const std::vector<double> &weights)
    {
        return ExcitationVector(std::vector<cldouble>(weights.begin(), weights.end()));
    }

    namespace
    {
        constexpr long double pi_l = 3.141592653589793238462643383279502884L;

        // exp(j 2 pi x) with the argument reduced to [-0.5, 0.5] cycles first
        cldouble unit_phasor(long double cycles)
        {
            const long double r = cycles - std::nearbyint(cycles);
            return std::polar(1.0L, 2.0L * pi_l * r);
        }
    } // namespace

    // Closed-form Dolph-Chebyshev coefficients. With n = 2M+1 the array factor is
    // T_2M(x0 cos(psi/2)) and the weight of elements +-p is
    //   w_p = M sum_{q=p}^{M} (-1)^(M-q) x0^(2q) (M+q-1)! / ((M-q)! (q-p)! (q+p)!)
    // The alternating sum loses about log10(max term) digits, so it is only used up to n = 25.
    static std::vector<long double> chebyshev_closed_form(std::size_t M, long double x0)
    {
        // log-factorials in long double
        std::vector<long double> lf(2 * M + 2, 0.0L);
        for (std::size_t i = 1; i < lf.size(); ++i)
            lf[i] = lf[i - 1] + std::log((long double)i);

        std::vector<long double> half(M + 1);
        for (std::size_t p = 0; p <= M; ++p)
        {
            long double acc = 0.0L;
            for (std::size_t q = std::max<std::size_t>(p, 1); q <= M; ++q)
            {
                const long double logterm = (long double)(2 * q) * std::log(x0) + lf[M + q - 1] - lf[M - q] - lf[q - p] - lf[q + p];
                const long double term = (long double)M * std::exp(logterm);
                acc += ((M - q) % 2 == 0) ? term : -term;
            }
            if (p == 0) // q = 0 contributes (-1)^M
                acc += (M % 2 == 0) ? 1.0L : -1.0L;
            half[p] = acc;
        }
        return half;
    }

    // Weights from the inverse DFT of the Chebyshev pattern sampled at n points. For odd n the
    // pattern is a trigonometric polynomial of degree M, so the n samples determine it exactly.
    static std::vector<long double> chebyshev_sampled(std::size_t n, long double x0)
    {
        const std::size_t M = (n - 1) / 2;
        const long double order = (long double)(n - 1);
        std::vector<long double> pattern(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            const long double x = x0 * std::cos(pi_l * (long double)k / (long double)n);
            if (std::abs(x) <= 1.0L)
                pattern[k] = std::cos(order * std::acos(x));
            else
            {
                const long double t = std::cosh(order * std::acosh(std::abs(x)));
                pattern[k] = (x < 0.0L && (n - 1) % 2 == 1) ? -t : t;
            }
        }
        std::vector<long double> half(M + 1);
        for (std::size_t p = 0; p <= M; ++p)
        {
            // psi_k = 2 pi k / n, AF(psi_k) = T(x0 cos(pi k / n))
            long double acc = 0.0L;
            for (std::size_t k = 0; k < n; ++k)
                acc += pattern[k] * std::cos(2.0L * pi_l * (long double)((p * k) % n) / (long double)n);
            half[p] = acc / (long double)n;
        }
        return half;
    }

    ExcitationVector chebyshev_taper(std::size_t n, double sidelobe_db)
    {
        if (n == 0 || n % 2 == 0)
            throw ValidationError("chebyshev_taper requires an odd element count");
        if (!(sidelobe_db > 0.0))
            throw ValidationError("chebyshev_taper requires sidelobe_db > 0");
        if (n == 1)
            return ExcitationVector::uniform(1);

        const std::size_t M = (n - 1) / 2;
        const long double R = std::pow(10.0L, (long double)sidelobe_db / 20.0L);
        const long double x0 = std::cosh(std::acosh(R) / (long double)(n - 1));

        const auto half = n <= 25 ? chebyshev_closed_form(M, x0) : chebyshev_sampled(n, x0);

        long double peak = 0.0L;
        for (const long double h : half)
            peak = std::max(peak, h);
        std::vector<cldouble> w(n);
        for (std::size_t p = 0; p <= M; ++p)
            w[M + p] = w[M - p] = cldouble(half[p] / peak);
        return ExcitationVector(std::move(w));
    }

    ExcitationVector auto_convolve(const ExcitationVector &w)
    {
        const std::size_t n = w.size();
        std::vector<cldouble> out(2 * n - 1, cldouble(0.0L));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out[i + j] += w.precise(i) * w.precise(j);
        return ExcitationVector(std::move(out));
    }

    ExcitationVector steer(const ExcitationVector &w, double u0, double spacing)
    {
        if (!(std::abs(u0) <= 1.0))
            throw ValidationError("steer requires |u0| <= 1");
        std::vector<cldouble> out(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            out[i] = w.precise(i) * unit_phasor(-(long double)spacing * (long double)signed_index(i, w.size()) * (long double)u0);
        return ExcitationVector(std::move(out));
    }

    bool check_conjugate_symmetry(const ExcitationVector &w, double tol)
    {
        const std::size_t n = w.size();
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(std::conj(w.precise(i)) - w.precise(n - 1 - i)) > (long double)tol)
                return false;
        return true;
    }

    static cldouble line_factor_ld(const ExcitationVector &w, double spacing, double u)
    {
        cldouble acc = 0.0L;
        for (std::size_t i = 0; i < w.size(); ++i)
            acc += w.precise(i) * unit_phasor((long double)spacing * (long double)signed_index(i, w.size()) * (long double)u);
        return acc / w.precise_abs_sum();
    }

    cdouble line_factor(const ExcitationVector &w, double spacing, double u)
    {
        const cldouble f = line_factor_ld(w, spacing, u);
        return {double(f.real()), double(f.imag())};
    }

    UvLattice UvLattice::square(std::size_t n)
    {
        if (n < 2)
            throw ValidationError("uv lattice needs at least 2 points per axis");
        UvLattice l;
        l.u_axis.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            l.u_axis[i] = -1.0 + 2.0 * double(i) / double(n - 1);
        l.v_axis = l.u_axis;
        return l;
    }

    // E[i][m] = exp(j 2 pi spacing m axis[i]), row-major
    static std::vector<cldouble> phase_table(const std::vector<double> &axis, std::size_t count, double spacing)
    {
        std::vector<cldouble> e(axis.size() * count);
        for (std::size_t i = 0; i < axis.size(); ++i)
            for (std::size_t m = 0; m < count; ++m)
                e[i * count + m] = unit_phasor((long double)spacing * (long double)signed_index(m, count) * (long double)axis[i]);
        return e;
    }

    static void find_peak(PowerPattern &p)
    {
        const std::size_t nv = p.lattice.v_axis.size();
        std::size_t best = 0;
        for (std::size_t k = 1; k < p.values.size(); ++k)
            if (p.values[k] > p.values[best])
                best = k;
        p.peak = p.values[best];
        p.peak_location = {p.lattice.u_axis[best / nv], p.lattice.v_axis[best % nv]};
    }

    PowerPattern ura_power_pattern(const ExcitationVector &wx, const ExcitationVector &wy,
                                   const UraGeometry &geometry, const UvLattice &lattice)
    {
        geometry.validate();
        if (wx.size() != geometry.m_count || wy.size() != geometry.n_count)
            throw ValidationError("URA excitation lengths do not match the geometry");

        const std::size_t M = geometry.m_count, N = geometry.n_count;
        const std::size_t nu = lattice.u_axis.size(), nv = lattice.v_axis.size();
        const auto ex = phase_table(lattice.u_axis, M, geometry.dx);
        const auto ey = phase_table(lattice.v_axis, N, geometry.dy);

        // Excitation matrix A = wx wy^T
        std::vector<cldouble> A(M * N);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t n = 0; n < N; ++n)
                A[m * N + n] = wx.precise(m) * wy.precise(n);
        const long double norm = wx.precise_abs_sum() * wy.precise_abs_sum();

        // Row-column evaluation of the 2-D sum: T[i][n] = sum_m A[m][n] ex[i][m]
        std::vector<cldouble> T(nu * N, cldouble(0.0L));
        for (std::size_t i = 0; i < nu; ++i)
            for (std::size_t m = 0; m < M; ++m)
            {
                const cldouble e = ex[i * M + m];
                for (std::size_t n = 0; n < N; ++n)
                    T[i * N + n] += A[m * N + n] * e;
            }

        PowerPattern out;
        out.lattice = lattice;
        out.values.resize(nu * nv);
        for (std::size_t i = 0; i < nu; ++i)
            for (std::size_t j = 0; j < nv; ++j)
            {
                cldouble d = 0.0L;
                for (std::size_t n = 0; n < N; ++n)
                    d += T[i * N + n] * ey[j * N + n];
                d /= norm;
                out.values[i * nv + j] = double(std::norm(d));
            }
        find_peak(out);
        return out;
    }

    PowerPattern ma_power_pattern(const ExcitationVector &wx, const ExcitationVector &wy,
                                  const MaGeometry &geometry, const UvLattice &lattice)
    {
        geometry.validate();
        if (wx.size() != geometry.x_count || wy.size() != geometry.y_count)
            throw ValidationError("MA excitation lengths do not match the geometry");

        const std::size_t nu = lattice.u_axis.size(), nv = lattice.v_axis.size();
        std::vector<cldouble> dx(nu), dy(nv);
        for (std::size_t i = 0; i < nu; ++i)
            dx[i] = line_factor_ld(wx, geometry.d, lattice.u_axis[i]);
        for (std::size_t j = 0; j < nv; ++j)
            dy[j] = line_factor_ld(wy, geometry.d, lattice.v_axis[j]);

        PowerPattern out;
        out.lattice = lattice;
        out.values.resize(nu * nv);
        for (std::size_t i = 0; i < nu; ++i)
            for (std::size_t j = 0; j < nv; ++j)
            {
                const cldouble p = dx[i] * dy[j];
                out.values[i * nv + j] = double(p.real());
                out.max_imag = std::max(out.max_imag, double(std::abs(p.imag())));
            }
        find_peak(out);
        return out;
    }
} // namespace masound
