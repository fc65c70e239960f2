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

#include "masound/commands.hpp"
#include "masound/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace masound
{
    namespace fs = std::filesystem;

    const ArrayScan *BeamscanResult::find(ArrayKind kind) const
    {
        for (const auto &a : arrays)
            if (a.kind == kind)
                return &a;
        return nullptr;
    }

    namespace
    {
        void say(const CommandOptions &o, const std::string &line)
        {
            if (!o.quiet && o.log)
                *o.log << line << '\n';
        }

        fs::path prepare_out(const CommandOptions &o)
        {
            std::error_code ec;
            fs::create_directories(o.out, ec);
            if (ec || !fs::is_directory(o.out))
                throw IoError("cannot create output directory '" + o.out.string() + "'");
            return o.out;
        }

        void write_normalized(const Scenario &s, const fs::path &dir)
        {
            std::ofstream out(dir / "scenario_normalized.json");
            out << dump_scenario(s).dump(2) << '\n';
            if (!out)
                throw IoError("cannot write '" + (dir / "scenario_normalized.json").string() + "'");
        }

        std::uint64_t seed_of(const Scenario &s, const CommandOptions &o) { return o.seed.value_or(s.noise.seed); }

        fs::path input_file(const CommandOptions &o, const char *name)
        {
            const fs::path p = *o.input / name;
            if (!fs::exists(p))
                throw IoError("missing input file '" + p.string() + "'");
            return p;
        }

        const char *kind_name(ArrayKind k) { return k == ArrayKind::ura ? "ura" : "ma"; }

        std::string ns(double seconds) { return format_sig9(seconds * 1e9); }

        double strongest_theta(const Scenario &s)
        {
            if (s.beamscan.theta_deg)
                return *s.beamscan.theta_deg;
            const PathComponent *best = nullptr;
            for (const auto &p : s.paths)
                if (!best || std::abs(p.amplitude) > std::abs(best->amplitude))
                    best = &p;
            return best ? best->direction.theta_deg : 90.0;
        }

        // Beam on the full (u, v) lattice at the center frequency, including points outside the visible disc
        void scan_beam(const BeamPattern &beam, const Scenario &s, const fs::path &dir, ArrayScan &result)
        {
            const std::vector<double> levels = beam.levels_db();
            const std::size_t rows = beam.grid.rows(), cols = beam.grid.cols();
            CsvWriter csv(dir / (std::string("beam_") + kind_name(beam.kind) + ".csv"), {"u", "v", "level_db"});
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j)
                {
                    const UvPoint uv = beam.grid.uv(i, j);
                    csv.row({format_sig9(uv.u), format_sig9(uv.v), format_level(levels[i * cols + j])});
                }
            csv.close();

            const auto peaks = find_peaks(levels, rows, cols, s.beamscan.peak_range_db, s.beamscan.peak_separation,
                                          s.beamscan.peak_separation, TieOrder::col_then_row);
            CsvWriter pk(dir / (std::string("beam_peaks_") + kind_name(beam.kind) + ".csv"), {"u", "v", "level_db"});
            const double cell = rows > 1 ? std::abs(beam.grid.uv(1, 0).u - beam.grid.uv(0, 0).u) : 0.0;
            for (const auto &p : peaks)
            {
                // A border maximum more than one cell outside the visible disc is the tail of a lobe
                // centred outside [-1, 1]^2
                const UvPoint uv = beam.grid.uv(p.row, p.col);
                const bool border = p.row == 0 || p.col == 0 || p.row + 1 == rows || p.col + 1 == cols;
                if (border && std::hypot(uv.u, uv.v) > 1.0 + cell)
                    continue;
                result.beam_peaks.push_back({uv.u, uv.v, p.level_db});
                pk.row({format_sig9(uv.u), format_sig9(uv.v), format_level(p.level_db)});
            }
            pk.close();
        }

        void write_padp(const Padp &padp, const fs::path &file, std::optional<double> max_delay_ns)
        {
            CsvWriter csv(file, {"azimuth_deg", "delay_ns", "level_db"});
            const std::vector<double> levels = padp.levels_db();
            const double limit = max_delay_ns ? *max_delay_ns * 1e-9 * (1.0 + 1e-12) : std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < padp.phi_axis.size(); ++p)
                for (std::size_t d = 0; d < padp.delay_axis.size() && padp.delay_axis[d] <= limit; ++d)
                    csv.row({format_sig9(padp.phi_axis[p]), ns(padp.delay_axis[d]), format_level(levels[d * padp.phi_axis.size() + p])});
            csv.close();
        }

        void scan_padp(const Padp &padp, const Scenario &s, const fs::path &dir, ArrayScan &result)
        {
            const std::string kind = kind_name(padp.kind);
            write_padp(padp, dir / ("padp_" + kind + ".csv"), s.beamscan.max_delay_ns);

            std::size_t sep_delay = s.beamscan.peak_separation;
            if (s.beamscan.padp_separation_ns && padp.delay_axis.size() > 1)
                sep_delay = std::size_t(std::llround(*s.beamscan.padp_separation_ns * 1e-9 / padp.delay_axis[1]));
            const auto peaks = find_peaks(padp, s.beamscan.peak_range_db, sep_delay, s.beamscan.peak_separation);
            CsvWriter pk(dir / ("padp_peaks_" + kind + ".csv"), {"azimuth_deg", "delay_ns", "level_db"});
            for (const auto &p : peaks)
            {
                result.padp_peaks.push_back({padp.phi_axis[p.col], padp.delay_axis[p.row], p.level_db});
                pk.row({format_sig9(padp.phi_axis[p.col]), ns(padp.delay_axis[p.row]), format_level(p.level_db)});
            }
            pk.close();
        }

        void write_paths(const EstimationReport &r, const fs::path &file)
        {
            CsvWriter csv(file, {"iteration", "power_db", "delay_ns", "elevation_deg", "azimuth_deg", "stop_reason"});
            for (const auto &p : r.paths)
                csv.row({std::to_string(p.iteration), format_sig9(p.amplitude_db), ns(p.delay_s), format_sig9(p.direction.theta_deg),
                         format_sig9(p.direction.phi_deg), stop_reason_name(r.stop_reason)});
            csv.close();
        }

        void write_diagnostics(const EstimationReport &r, const fs::path &file)
        {
            CsvWriter csv(file, {"iteration", "beam_peak_db", "padp_peak_db", "elevation_deg", "azimuth_deg", "peak_delay_ns",
                                 "gate_start_ns", "gate_stop_ns", "gated_bins", "candidate_db", "candidates_tried", "candidate_rank",
                                 "accepted", "joint_estimate"});
            for (const auto &d : r.diagnostics)
                csv.row({std::to_string(d.iteration), format_level(d.beam_peak_db), format_level(d.padp_peak_db),
                         format_sig9(d.theta_deg), format_sig9(d.phi_deg), ns(d.peak_delay_s), ns(d.gate_start_s), ns(d.gate_stop_s),
                         std::to_string(d.gated_bins), format_level(d.candidate_db), std::to_string(d.candidates_tried),
                         std::to_string(d.candidate_rank), d.accepted ? "1" : "0", d.joint_estimate ? "1" : "0"});
            csv.close();
        }

        std::string describe(const EstimatedPath &p)
        {
            return "  #" + std::to_string(p.iteration) + "  " + format_sig9(p.amplitude_db) + " dB  theta " +
                   format_sig9(p.direction.theta_deg) + "  phi " + format_sig9(p.direction.phi_deg) + "  delay " + ns(p.delay_s) + " ns";
        }
    } // namespace

    std::optional<CfrSet> load_ura_cfr(const Scenario &s, const CommandOptions &o)
    {
        if (!s.ura)
            return std::nullopt;
        if (o.input)
        {
            CfrSet cfr = read_cfr(input_file(o, cfr_ura_file));
            if (cfr.layout != CfrLayout::ura || cfr.n_elem_x != s.ura->m_count || cfr.n_elem_y != s.ura->n_count)
                throw ValidationError("URA CFR file does not match the scenario geometry");
            return cfr;
        }
        return add_noise(gen_ura_cfr(s.paths, *s.ura, s.freqs, s.phase), s.noise.snr_db, seed_of(s, o));
    }

    std::optional<MaCfr> load_ma_cfr(const Scenario &s, const CommandOptions &o)
    {
        if (!s.ma)
            return std::nullopt;
        if (o.input)
        {
            MaCfr cfr = read_ma_cfr(input_file(o, cfr_ma_x_file), input_file(o, cfr_ma_y_file));
            if (cfr.x.n_elem_x != s.ma->x_count || cfr.y.n_elem_y != s.ma->y_count)
                throw ValidationError("MA CFR files do not match the scenario geometry");
            return cfr;
        }
        // The MA draws from an independent stream so URA and MA noise are not correlated
        return add_noise(gen_ma_cfr(s.paths, *s.ma, s.freqs, s.phase), s.noise.snr_db, seed_of(s, o) + 1);
    }

    SynthPatternResult cmd_synth_pattern(const Scenario &s, const CommandOptions &o)
    {
        if (!s.ura || !s.ma)
            throw ValidationError("synth-pattern needs both 'ura' and 'ma' arrays");
        const fs::path dir = prepare_out(o);
        write_normalized(s, dir);

        const UvLattice lattice = UvLattice::square(s.pattern.lattice);
        const Taper ura_w = s.pattern.taper.for_ura(s.ura->m_count, s.ura->n_count);
        const ExcitationVector wx = steer(ura_w.x, s.pattern.steer_u, s.ura->dx);
        const ExcitationVector wy = steer(ura_w.y, s.pattern.steer_v, s.ura->dy);

        SynthPatternResult result;
        const bool derived = !(s.pattern.taper.kind == TaperSpec::Kind::custom && !s.pattern.taper.ma_x.empty());
        ExcitationVector mx, my;
        if (derived)
        {
            mx = auto_convolve(wx);
            my = auto_convolve(wy);
        }
        else
        {
            const Taper ma_w = s.pattern.taper.for_ma(s.ma->x_count, s.ma->y_count);
            mx = steer(ma_w.x, s.pattern.steer_u, s.ma->d);
            my = steer(ma_w.y, s.pattern.steer_v, s.ma->d);
        }

        const bool same_geometry = *s.ma == MaGeometry::equivalent_to(*s.ura);
        const bool symmetric = check_conjugate_symmetry(wx) && check_conjugate_symmetry(wy);
        result.checked = derived && same_geometry && symmetric;
        if (!derived)
            result.note = "MA weights given explicitly; equivalence check skipped";
        else if (!same_geometry)
            result.note = "MA geometry is not the URA-equivalent one; equivalence check skipped";
        else if (!symmetric)
            result.note = "warning: excitations are not conjugate-symmetric; equivalence check skipped";

        const PowerPattern pu = ura_power_pattern(wx, wy, *s.ura, lattice);
        const PowerPattern pm = ma_power_pattern(mx, my, *s.ma, lattice);

        CsvWriter cu(dir / "pattern_ura.csv", {"u", "v", "level_db"});
        CsvWriter cm(dir / "pattern_ma.csv", {"u", "v", "level_db"});
        const std::size_t nu = lattice.u_axis.size(), nv = lattice.v_axis.size();
        for (std::size_t i = 0; i < nu; ++i)
            for (std::size_t j = 0; j < nv; ++j)
            {
                const double lu = std::max(to_db10(pu.at(i, j)), -300.0);
                const double lm = pm.at(i, j) > 0.0 ? std::max(to_db10(pm.at(i, j)), -300.0) : -300.0;
                result.max_deviation_db = std::max(result.max_deviation_db, std::abs(lu - lm));
                const std::string u = format_sig9(lattice.u_axis[i]), v = format_sig9(lattice.v_axis[j]);
                cu.row({u, v, format_level(lu)});
                cm.row({u, v, format_level(lm)});
            }
        cu.close();
        cm.close();

        result.equivalent = !result.checked || result.max_deviation_db < 1e-6;
        if (!result.note.empty())
            say(o, result.note);
        say(o, "max |P_URA - P_MA| = " + format_sig9(result.max_deviation_db) + " dB over " + std::to_string(nu * nv) + " lattice points" +
                   (result.checked ? (result.equivalent ? " (equivalent)" : " (NOT equivalent)") : ""));
        return result;
    }

    void cmd_simulate(const Scenario &s, const CommandOptions &o)
    {
        const fs::path dir = prepare_out(o);
        write_normalized(s, dir);
        CommandOptions synth = o;
        synth.input.reset();
        if (auto ura = load_ura_cfr(s, synth))
        {
            write_cfr(dir / cfr_ura_file, *ura);
            say(o, "wrote " + (dir / cfr_ura_file).string());
        }
        if (auto ma = load_ma_cfr(s, synth))
        {
            write_cfr(dir / cfr_ma_x_file, ma->x);
            write_cfr(dir / cfr_ma_y_file, ma->y);
            say(o, "wrote " + (dir / cfr_ma_x_file).string() + ", " + (dir / cfr_ma_y_file).string());
        }
    }

    BeamscanResult cmd_beamscan(const Scenario &s, const CommandOptions &o)
    {
        const fs::path dir = prepare_out(o);
        write_normalized(s, dir);
        const auto ura = load_ura_cfr(s, o);
        const auto ma = load_ma_cfr(s, o);

        const AngularGrid lattice = AngularGrid::from_lattice(UvLattice::square(s.beamscan.lattice));
        const double theta = strongest_theta(s);
        BeamscanResult result;

        if (ura)
        {
            const Taper t = s.beamscan.taper.for_ura(ura->n_elem_x, ura->n_elem_y);
            const double fc = ura->freqs.at(ura->freqs.center_index());
            ArrayScan a{ArrayKind::ura, theta, {}, {}};
            scan_beam(cbf_ura(*ura, lattice, fc, t), s, dir, a);
            scan_padp(padp_ura(*ura, theta, s.scan().phi_axis, s.estimator.pad_factor, t), s, dir, a);
            result.arrays.push_back(a);
        }
        if (ma)
        {
            const Taper t = s.beamscan.taper.for_ma(ma->x.n_elem_x, ma->y.n_elem_y);
            const double fc = ma->x.freqs.at(ma->x.freqs.center_index());
            ArrayScan a{ArrayKind::ma, theta, {}, {}};
            scan_beam(cbf_ma(*ma, lattice, fc, t), s, dir, a);
            scan_padp(padp_ma(*ma, theta, s.scan().phi_axis, s.estimator.pad_factor, t), s, dir, a);
            result.arrays.push_back(a);
        }

        for (const auto &a : result.arrays)
        {
            say(o, std::string(kind_name(a.kind)) + ": " + std::to_string(a.beam_peaks.size()) + " beam maxima, " +
                       std::to_string(a.padp_peaks.size()) + " PADP maxima at theta " + format_sig9(a.theta_deg));
            for (std::size_t k = 0; k < a.padp_peaks.size() && k < 10; ++k)
            {
                const auto &p = a.padp_peaks[k];
                say(o, "  phi " + format_sig9(p.phi_deg) + "  delay " + ns(p.delay_s) + " ns  " + format_level(p.level_db) + " dB");
            }
        }
        return result;
    }

    EstimationReport cmd_estimate(const Scenario &s, const CommandOptions &o)
    {
        if (!s.ma)
            throw ValidationError("estimate needs an 'ma' array");
        const fs::path dir = prepare_out(o);
        write_normalized(s, dir);
        const auto ma = load_ma_cfr(s, o);

        EstimatorConfig config = s.estimator;
        config.keep_snapshots = true;
        const EstimationReport r = run_sic(*ma, config);

        write_paths(r, dir / "paths.csv");
        write_diagnostics(r, dir / "diagnostics.csv");
        for (std::size_t q = 0; q < r.snapshots.size(); ++q)
            write_padp(r.snapshots[q], dir / ("padp_residual_" + std::to_string(q) + ".csv"), s.beamscan.max_delay_ns);

        say(o, std::to_string(r.paths.size()) + " path(s), stop: " + stop_reason_name(r.stop_reason));
        for (const auto &p : r.paths)
            say(o, describe(p));
        return r;
    }

    std::vector<ComparisonRow> align_paths(const std::vector<EstimatedPath> &ura, const std::vector<EstimatedPath> &ma)
    {
        auto cost = [](const EstimatedPath &a, const EstimatedPath &b)
        {
            return std::abs(a.delay_s - b.delay_s) / 0.5e-9 + std::abs(a.direction.phi_deg - b.direction.phi_deg) +
                   std::abs(a.direction.theta_deg - b.direction.theta_deg);
        };
        std::vector<std::optional<std::size_t>> partner(ura.size());
        std::vector<bool> taken(ma.size(), false);
        for (std::size_t round = 0; round < std::min(ura.size(), ma.size()); ++round)
        {
            double best = std::numeric_limits<double>::infinity();
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < ura.size(); ++i)
                for (std::size_t j = 0; j < ma.size(); ++j)
                    if (!partner[i] && !taken[j] && cost(ura[i], ma[j]) < best)
                    {
                        best = cost(ura[i], ma[j]);
                        bi = i;
                        bj = j;
                    }
            partner[bi] = bj;
            taken[bj] = true;
        }

        std::vector<ComparisonRow> rows;
        for (std::size_t i = 0; i < ura.size(); ++i)
        {
            ComparisonRow r;
            r.index = rows.size() + 1;
            r.ura = ura[i];
            if (partner[i])
                r.ma = ma[*partner[i]];
            rows.push_back(r);
        }
        for (std::size_t j = 0; j < ma.size(); ++j)
            if (!taken[j])
            {
                ComparisonRow r;
                r.index = rows.size() + 1;
                r.ma = ma[j];
                rows.push_back(r);
            }
        return rows;
    }

    CompareResult cmd_compare(const Scenario &s, const CommandOptions &o)
    {
        if (!s.ura || !s.ma)
            throw ValidationError("compare needs both 'ura' and 'ma' arrays");
        const fs::path dir = prepare_out(o);
        write_normalized(s, dir);

        CompareResult result;
        result.ura = estimate_ura_paths(*load_ura_cfr(s, o), s.estimator);
        result.ma = run_sic(*load_ma_cfr(s, o), s.estimator);
        result.rows = align_paths(result.ura.paths, result.ma.paths);
        result.count_mismatch = result.ura.paths.size() != result.ma.paths.size();

        CsvWriter csv(dir / "comparison.csv",
                      {"path", "ura_delay_ns", "ura_azimuth_deg", "ura_power_db", "ma_delay_ns", "ma_azimuth_deg", "ma_power_db",
                       "error_delay_ns", "error_azimuth_deg", "error_power_db", "count_mismatch"});
        for (const auto &r : result.rows)
        {
            std::vector<std::string> f{std::to_string(r.index)};
            for (const auto &side : {r.ura, r.ma})
                if (side)
                    f.insert(f.end(), {ns(side->delay_s), format_sig9(side->direction.phi_deg), format_sig9(side->amplitude_db)});
                else
                    f.insert(f.end(), {"", "", ""});
            if (r.matched())
                f.insert(f.end(), {format_sig9(r.delay_error_ns()), format_sig9(r.azimuth_error_deg()), format_sig9(r.power_error_db())});
            else
                f.insert(f.end(), {"", "", ""});
            f.push_back(result.count_mismatch ? "1" : "0");
            csv.row(f);
        }
        csv.close();

        say(o, "URA " + std::to_string(result.ura.paths.size()) + " path(s), MA " + std::to_string(result.ma.paths.size()) + " path(s)" +
                   (result.count_mismatch ? "  [count mismatch]" : ""));
        for (const auto &r : result.rows)
            if (r.matched())
                say(o, "  #" + std::to_string(r.index) + "  d_delay " + format_sig9(r.delay_error_ns()) + " ns  d_azimuth " +
                           format_sig9(r.azimuth_error_deg()) + " deg  d_power " + format_sig9(r.power_error_db()) + " dB");
        return result;
    }
} // namespace masound
