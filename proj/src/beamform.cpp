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

#include "masound/beamform.hpp"
#include "masound/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace masound
{
    UvPoint AngularGrid::uv(std::size_t i, std::size_t j) const
    {
        if (kind == Kind::uv)
            return {axis0[i], axis1[j]};
        return uv_map({axis0[i], axis1[j]});
    }

    std::vector<double> BeamPattern::levels_db() const
    {
        std::vector<double> out(values.size());
        for (std::size_t k = 0; k < values.size(); ++k)
            out[k] = level_db(kind, std::abs(values[k]));
        return out;
    }

    std::vector<double> Padp::levels_db() const
    {
        std::vector<double> out(values.size());
        for (std::size_t k = 0; k < values.size(); ++k)
            out[k] = level_db(kind, std::abs(values[k]));
        return out;
    }

    namespace
    {
        ExcitationVector weights_or_uniform(const std::optional<Taper> &taper, bool x_axis, std::size_t count)
        {
            if (!taper)
                return ExcitationVector::uniform(count);
            const ExcitationVector &w = x_axis ? taper->x : taper->y;
            if (w.size() != count)
                throw ValidationError("taper length " + std::to_string(w.size()) + " does not match " + std::to_string(count) + " elements");
            return w;
        }

        // conj steering phase exp(-j k m spacing c) for every element position of a line
        void conj_steering(std::vector<cdouble> &out, std::size_t count, double k, double spacing, double c)
        {
            out.resize(count);
            for (std::size_t i = 0; i < count; ++i)
                out[i] = std::polar(1.0, -k * double(signed_index(i, count)) * spacing * c);
        }

        // Combined conj-steering * weight / norm row for one direction
        void steering_row(const CfrSet &cfr, double k, const UvPoint &uv, const ExcitationVector &wx,
                          const ExcitationVector &wy, double norm, cdouble *row)
        {
            std::vector<cdouble> ex, ey;
            conj_steering(ex, cfr.n_elem_x, k, cfr.spacing_x, uv.u);
            conj_steering(ey, cfr.n_elem_y, k, cfr.spacing_y, uv.v);
            for (std::size_t ix = 0; ix < cfr.n_elem_x; ++ix)
                for (std::size_t iy = 0; iy < cfr.n_elem_y; ++iy)
                    row[cfr.element_row(ix, iy)] = ex[ix] * wx[ix] * ey[iy] * wy[iy] / norm;
        }

        // Single-sub-array beam sum toward (u, v) at frequency column l
        cdouble line_beam(const CfrSet &cfr, std::size_t l, double k, const UvPoint &uv,
                          const ExcitationVector &wx, const ExcitationVector &wy, double norm)
        {
            std::vector<cdouble> row(cfr.elements());
            steering_row(cfr, k, uv, wx, wy, norm, row.data());
            cdouble acc = 0.0;
            for (std::size_t e = 0; e < cfr.elements(); ++e)
                acc += row[e] * cfr.values(Eigen::Index(e), Eigen::Index(l));
            return acc;
        }

        // rows = directions, cols = frequencies
        CMatrix spectra(const CfrSet &cfr, double theta_deg, const std::vector<double> &phi_axis,
                        const ExcitationVector &wx, const ExcitationVector &wy)
        {
            const double norm = wx.abs_sum() * wy.abs_sum();
            const std::size_t E = cfr.elements();
            const std::size_t L = cfr.freqs.size();
            const Eigen::Index P = Eigen::Index(phi_axis.size());

            if (cfr.phase.narrowband)
            {
                CMatrix S(P, Eigen::Index(E));
                for (Eigen::Index p = 0; p < P; ++p)
                    steering_row(cfr, cfr.phase.wavenumber(0.0), uv_map({theta_deg, phi_axis[std::size_t(p)]}), wx, wy, norm, S.row(p).data());
                return S * cfr.values;
            }

            CMatrix out(P, Eigen::Index(L));
            std::vector<cdouble> row(E);
            for (Eigen::Index p = 0; p < P; ++p)
            {
                const UvPoint uv = uv_map({theta_deg, phi_axis[std::size_t(p)]});
                for (std::size_t l = 0; l < L; ++l)
                {
                    steering_row(cfr, cfr.phase.wavenumber(cfr.freqs.at(l)), uv, wx, wy, norm, row.data());
                    cdouble acc = 0.0;
                    for (std::size_t e = 0; e < E; ++e)
                        acc += row[e] * cfr.values(Eigen::Index(e), Eigen::Index(l));
                    out(p, Eigen::Index(l)) = acc;
                }
            }
            return out;
        }

        Padp to_padp(ArrayKind kind, double theta_deg, const std::vector<double> &phi_axis, const CMatrix &profiles,
                     const DelayTransform &tr)
        {
            Padp out;
            out.kind = kind;
            out.theta_deg = theta_deg;
            out.phi_axis = phi_axis;
            out.delay_axis = tr.delays();
            const std::size_t nphi = phi_axis.size(), nd = tr.delay_bins();
            out.values.resize(nphi * nd);
            for (std::size_t p = 0; p < nphi; ++p)
                for (std::size_t d = 0; d < nd; ++d)
                    out.values[d * nphi + p] = profiles(Eigen::Index(p), Eigen::Index(d));
            return out;
        }
    } // namespace

    BeamPattern cbf_ura(const CfrSet &cfr, const AngularGrid &grid, double f_hz, const std::optional<Taper> &taper)
    {
        cfr.validate();
        const std::size_t l = cfr.freqs.index_of(f_hz);
        const auto wx = weights_or_uniform(taper, true, cfr.n_elem_x);
        const auto wy = weights_or_uniform(taper, false, cfr.n_elem_y);
        const double norm = wx.abs_sum() * wy.abs_sum();
        const double k = cfr.phase.wavenumber(cfr.freqs.at(l));
        const std::size_t M = cfr.n_elem_x, N = cfr.n_elem_y;

        BeamPattern out;
        out.grid = grid;
        out.frequency_hz = cfr.freqs.at(l);
        out.kind = ArrayKind::ura;
        out.values.assign(grid.rows() * grid.cols(), cdouble(0.0));

        std::vector<cdouble> ex, ey;
        if (grid.kind == AngularGrid::Kind::uv)
        {
            // Row-column evaluation: T[i][iy] = sum_ix conj(ax) wx H[ix][iy] wy
            std::vector<cdouble> T(grid.rows() * N, cdouble(0.0));
            for (std::size_t i = 0; i < grid.rows(); ++i)
            {
                conj_steering(ex, M, k, cfr.spacing_x, grid.axis0[i]);
                for (std::size_t ix = 0; ix < M; ++ix)
                    for (std::size_t iy = 0; iy < N; ++iy)
                        T[i * N + iy] += ex[ix] * wx[ix] * cfr.values(Eigen::Index(cfr.element_row(ix, iy)), Eigen::Index(l)) * wy[iy];
            }
            for (std::size_t j = 0; j < grid.cols(); ++j)
            {
                conj_steering(ey, N, k, cfr.spacing_y, grid.axis1[j]);
                for (std::size_t i = 0; i < grid.rows(); ++i)
                {
                    cdouble acc = 0.0;
                    for (std::size_t iy = 0; iy < N; ++iy)
                        acc += ey[iy] * T[i * N + iy];
                    out.values[i * grid.cols() + j] = acc / norm;
                }
            }
            return out;
        }

        for (std::size_t i = 0; i < grid.rows(); ++i)
            for (std::size_t j = 0; j < grid.cols(); ++j)
                out.values[i * grid.cols() + j] = line_beam(cfr, l, k, grid.uv(i, j), wx, wy, norm);
        return out;
    }

    BeamPattern cbf_ma(const MaCfr &cfr, const AngularGrid &grid, double f_hz, const std::optional<Taper> &taper)
    {
        cfr.validate();
        const std::size_t l = cfr.x.freqs.index_of(f_hz);
        const auto wx = weights_or_uniform(taper, true, cfr.x.n_elem_x);
        const auto wy = weights_or_uniform(taper, false, cfr.y.n_elem_y);
        const auto one = ExcitationVector::uniform(1);
        const double k = cfr.x.phase.wavenumber(cfr.x.freqs.at(l));

        BeamPattern out;
        out.grid = grid;
        out.frequency_hz = cfr.x.freqs.at(l);
        out.kind = ArrayKind::ma;
        out.values.resize(grid.rows() * grid.cols());

        if (grid.kind == AngularGrid::Kind::uv)
        {
            std::vector<cdouble> bx(grid.rows()), by(grid.cols());
            for (std::size_t i = 0; i < grid.rows(); ++i)
                bx[i] = line_beam(cfr.x, l, k, {grid.axis0[i], 0.0}, wx, one, wx.abs_sum());
            for (std::size_t j = 0; j < grid.cols(); ++j)
                by[j] = line_beam(cfr.y, l, k, {0.0, grid.axis1[j]}, one, wy, wy.abs_sum());
            for (std::size_t i = 0; i < grid.rows(); ++i)
                for (std::size_t j = 0; j < grid.cols(); ++j)
                    out.values[i * grid.cols() + j] = bx[i] * by[j];
            return out;
        }

        for (std::size_t i = 0; i < grid.rows(); ++i)
            for (std::size_t j = 0; j < grid.cols(); ++j)
            {
                const UvPoint uv = grid.uv(i, j);
                out.values[i * grid.cols() + j] = line_beam(cfr.x, l, k, uv, wx, one, wx.abs_sum()) *
                                                  line_beam(cfr.y, l, k, uv, one, wy, wy.abs_sum());
            }
        return out;
    }

    CMatrix beam_spectra_ura(const CfrSet &cfr, double theta_deg, const std::vector<double> &phi_axis, const std::optional<Taper> &taper)
    {
        cfr.validate();
        return spectra(cfr, theta_deg, phi_axis, weights_or_uniform(taper, true, cfr.n_elem_x), weights_or_uniform(taper, false, cfr.n_elem_y));
    }

    CMatrix beam_spectra_subarray(const CfrSet &sub, double theta_deg, const std::vector<double> &phi_axis, const std::optional<Taper> &taper)
    {
        sub.validate();
        const auto one = ExcitationVector::uniform(1);
        switch (sub.layout)
        {
        case CfrLayout::ma_x:
            return spectra(sub, theta_deg, phi_axis, weights_or_uniform(taper, true, sub.n_elem_x), one);
        case CfrLayout::ma_y:
            return spectra(sub, theta_deg, phi_axis, one, weights_or_uniform(taper, false, sub.n_elem_y));
        default:
            throw ValidationError("beam_spectra_subarray expects an ma_x or ma_y CFR");
        }
    }

    CMatrix beam_spectra_ma(const MaCfr &cfr, double theta_deg, const std::vector<double> &phi_axis, const std::optional<Taper> &taper)
    {
        cfr.validate();
        return beam_spectra_subarray(cfr.x, theta_deg, phi_axis, taper).cwiseProduct(beam_spectra_subarray(cfr.y, theta_deg, phi_axis, taper));
    }

    Padp padp_ura(const CfrSet &cfr, double theta_deg, const std::vector<double> &phi_axis, std::size_t pad_factor,
                  const std::optional<Taper> &taper)
    {
        const DelayTransform tr(cfr.freqs, pad_factor);
        return to_padp(ArrayKind::ura, theta_deg, phi_axis, tr.inverse_rows(beam_spectra_ura(cfr, theta_deg, phi_axis, taper)), tr);
    }

    Padp padp_ma(const MaCfr &cfr, double theta_deg, const std::vector<double> &phi_axis, std::size_t pad_factor,
                 const std::optional<Taper> &taper)
    {
        const DelayTransform tr(cfr.x.freqs, pad_factor);
        return to_padp(ArrayKind::ma, theta_deg, phi_axis, tr.inverse_rows(beam_spectra_ma(cfr, theta_deg, phi_axis, taper)), tr);
    }

    std::vector<PredictedTerm> predict_ma_terms(const PathSet &paths)
    {
        if (paths.empty())
            throw ValidationError("predict_ma_terms requires at least one path");
        std::vector<PredictedTerm> terms;
        terms.reserve(paths.size() * paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i)
            for (std::size_t j = 0; j < paths.size(); ++j)
            {
                const UvPoint ui = uv_map(paths[i].direction), vj = uv_map(paths[j].direction);
                terms.push_back({ui.u, vj.v, paths[i].delay_s + paths[j].delay_s,
                                 0.5 * (paths[i].power_db() + paths[j].power_db()), {i, j}});
            }
        return terms;
    }

    bool is_local_max(const std::vector<double> &values, std::size_t rows, std::size_t cols, std::size_t i, std::size_t j)
    {
        const double c = values[i * cols + j];
        for (long di = -1; di <= 1; ++di)
            for (long dj = -1; dj <= 1; ++dj)
            {
                const long r = long(i) + di, s = long(j) + dj;
                if ((di == 0 && dj == 0) || r < 0 || s < 0 || r >= long(rows) || s >= long(cols))
                    continue;
                if (values[std::size_t(r) * cols + std::size_t(s)] > c)
                    return false;
            }
        return true;
    }

    std::vector<Peak> find_peaks(const std::vector<double> &levels, std::size_t rows, std::size_t cols,
                                 double dynamic_range_db, std::size_t min_sep_rows, std::size_t min_sep_cols, TieOrder order)
    {
        if (rows == 0 || cols == 0 || levels.size() != rows * cols)
            throw ValidationError("find_peaks: empty or malformed grid");

        auto before = [order](std::size_t r1, std::size_t c1, std::size_t r2, std::size_t c2)
        {
            return order == TieOrder::row_then_col ? std::pair(r1, c1) < std::pair(r2, c2) : std::pair(c1, r1) < std::pair(c2, r2);
        };

        const double global = *std::max_element(levels.begin(), levels.end());
        const double floor = global - dynamic_range_db;

        // Connected plateaus of equal level; a plateau is a maximum when no neighbour is higher
        std::vector<Peak> candidates;
        std::vector<unsigned char> seen(levels.size(), 0);
        std::vector<std::size_t> stack, members;
        for (std::size_t start = 0; start < levels.size(); ++start)
        {
            if (seen[start])
                continue;
            const double level = levels[start];
            bool maximum = true;
            members.clear();
            stack.assign(1, start);
            seen[start] = 1;
            while (!stack.empty())
            {
                const std::size_t k = stack.back();
                stack.pop_back();
                members.push_back(k);
                const long i = long(k / cols), j = long(k % cols);
                for (long di = -1; di <= 1; ++di)
                    for (long dj = -1; dj <= 1; ++dj)
                    {
                        const long r = i + di, s = j + dj;
                        if ((di == 0 && dj == 0) || r < 0 || s < 0 || r >= long(rows) || s >= long(cols))
                            continue;
                        const std::size_t n = std::size_t(r) * cols + std::size_t(s);
                        if (levels[n] > level)
                            maximum = false;
                        else if (levels[n] == level && !seen[n])
                        {
                            seen[n] = 1;
                            stack.push_back(n);
                        }
                    }
            }
            if (!maximum || level < floor)
                continue;
            std::size_t best = members.front();
            for (const std::size_t k : members)
                if (before(k / cols, k % cols, best / cols, best % cols))
                    best = k;
            candidates.push_back({best / cols, best % cols, level});
        }

        std::sort(candidates.begin(), candidates.end(), [&](const Peak &a, const Peak &b)
                  {
                      if (a.level_db != b.level_db)
                          return a.level_db > b.level_db;
                      return before(a.row, a.col, b.row, b.col); });

        std::vector<Peak> accepted;
        for (const auto &c : candidates)
        {
            bool close = false;
            for (const auto &a : accepted)
            {
                const std::size_t dr = c.row > a.row ? c.row - a.row : a.row - c.row;
                const std::size_t dc = c.col > a.col ? c.col - a.col : a.col - c.col;
                if (dr <= min_sep_rows && dc <= min_sep_cols)
                {
                    close = true;
                    break;
                }
            }
            if (!close)
                accepted.push_back(c);
        }
        return accepted;
    }

    std::vector<Peak> find_peaks(const Padp &padp, double dynamic_range_db, std::size_t min_sep_delay, std::size_t min_sep_phi)
    {
        return find_peaks(padp.levels_db(), padp.delay_axis.size(), padp.phi_axis.size(), dynamic_range_db,
                          min_sep_delay, min_sep_phi, TieOrder::row_then_col);
    }

    std::vector<Peak> find_peaks(const BeamPattern &beam, double dynamic_range_db, std::size_t min_sep)
    {
        return find_peaks(beam.levels_db(), beam.grid.rows(), beam.grid.cols(), dynamic_range_db, min_sep, min_sep,
                          TieOrder::col_then_row);
    }

    namespace
    {
        // Visits cells in tie priority order; a later cell wins only if clearly larger
        template <typename At>
        Peak argmax(std::size_t outer, std::size_t inner, bool rows_outer, At at, ArrayKind kind)
        {
            constexpr double rel_tie = 1e-12;
            double best = -1.0;
            Peak p;
            for (std::size_t a = 0; a < outer; ++a)
                for (std::size_t b = 0; b < inner; ++b)
                {
                    const std::size_t r = rows_outer ? a : b, c = rows_outer ? b : a;
                    const double m = std::abs(at(r, c));
                    if (m > best * (1.0 + rel_tie) && m > best)
                    {
                        best = m;
                        p.row = r;
                        p.col = c;
                    }
                }
            if (!(best > 0.0))
                throw NumericalError("no signal: grid is all zero");
            p.level_db = level_db(kind, best);
            return p;
        }
    } // namespace

    Peak strongest(const BeamPattern &beam)
    {
        return argmax(beam.grid.cols(), beam.grid.rows(), false, [&](std::size_t r, std::size_t c)
                      { return beam.at(r, c); }, beam.kind);
    }

    Peak strongest(const Padp &padp)
    {
        return argmax(padp.delay_axis.size(), padp.phi_axis.size(), true, [&](std::size_t r, std::size_t c)
                      { return padp.at(r, c); }, padp.kind);
    }
} // namespace masound
