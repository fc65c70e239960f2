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

#include "masound/sic.hpp"
#include "masound/transform.hpp"

#include <cmath>

namespace masound
{
    void EstimatorConfig::validate() const
    {
        if (!(epsilon_db > 0.0) || !std::isfinite(epsilon_db))
            throw ValidationError("epsilon_db must be positive and finite");
        if (max_iterations < 1)
            throw ValidationError("max_iterations must be >= 1");
        if (gate_db && !(*gate_db > 0.0))
            throw ValidationError("gate_db must be positive");
        if (pad_factor < 1)
            throw ValidationError("pad_factor must be >= 1");
        if (candidate_peaks < 1)
            throw ValidationError("candidate_peaks must be >= 1");
        if (scan.theta_axis.empty() || scan.phi_axis.empty())
            throw ValidationError("scan grid needs at least one theta and one phi value");
        for (const double t : scan.theta_axis)
            if (!(t >= 0.0 && t <= 90.0))
                throw ValidationError("scan theta values must lie in [0, 90] degrees");
    }

    const char *stop_reason_name(StopReason reason)
    {
        return reason == StopReason::dynamic_range ? "dynamic-range" : "max-iterations";
    }

    PathSet EstimationReport::as_paths() const
    {
        PathSet out;
        for (const auto &p : paths)
            out.push_back(p.as_component());
        return out;
    }

    std::size_t DelayGate::count(std::size_t r) const
    {
        std::size_t n = 0;
        for (std::size_t k = 0; k < bins; ++k)
            n += mask[r * bins + k];
        return n;
    }

    Direction detect_strongest(const BeamPattern &beam)
    {
        if (beam.grid.kind != AngularGrid::Kind::theta_phi)
            throw ValidationError("detect_strongest needs a (theta, phi) scan grid");
        const Peak p = strongest(beam);
        return {beam.grid.axis0[p.row], beam.grid.axis1[p.col]};
    }

    PadpRefinement refine_on_padp(const Padp &padp)
    {
        PadpRefinement r;
        r.peak = strongest(padp);
        r.phi_deg = padp.phi_axis[r.peak.col];
        r.peak_delay_s = padp.delay_axis[r.peak.row];
        r.delay_s = padp.kind == ArrayKind::ma ? 0.5 * r.peak_delay_s : r.peak_delay_s;
        return r;
    }

    DelayGate build_label_vector(const CMatrix &synthetic_cir, double threshold_db)
    {
        DelayGate g;
        g.rows = std::size_t(synthetic_cir.rows());
        g.bins = std::size_t(synthetic_cir.cols());
        g.mask.assign(g.rows * g.bins, 0);
        const double rel = std::pow(10.0, -threshold_db / 20.0);
        for (std::size_t r = 0; r < g.rows; ++r)
        {
            const double limit = rel * synthetic_cir.row(Eigen::Index(r)).cwiseAbs().maxCoeff();
            for (std::size_t k = 0; k < g.bins; ++k)
                g.mask[r * g.bins + k] = std::abs(synthetic_cir(Eigen::Index(r), Eigen::Index(k))) >= limit;
        }
        return g;
    }

    CMatrix extract_path_cir(const CMatrix &residual_cir, const DelayGate &gate)
    {
        if (std::size_t(residual_cir.rows()) != gate.rows || std::size_t(residual_cir.cols()) != gate.bins)
            throw ValidationError("CIR and delay gate do not share the element/delay axes");
        CMatrix out = residual_cir;
        for (std::size_t r = 0; r < gate.rows; ++r)
            for (std::size_t k = 0; k < gate.bins; ++k)
                if (!gate.at(r, k))
                    out(Eigen::Index(r), Eigen::Index(k)) = 0.0;
        return out;
    }

    namespace
    {
        cdouble profile_at(const CMatrix &spectrum_row, const FrequencyGrid &freqs, double tau)
        {
            const DelayTransform tr(freqs, 1);
            return tr.inverse_at(std::span<const cdouble>(spectrum_row.data(), std::size_t(spectrum_row.cols())), tau);
        }
    } // namespace

    cdouble estimate_power(const MaCfr &extracted, const Direction &direction, double delay_s, const std::optional<Taper> &taper)
    {
        const std::vector<double> phi{direction.phi_deg};
        const CMatrix bx = beam_spectra_subarray(extracted.x, direction.theta_deg, phi, taper);
        const CMatrix by = beam_spectra_subarray(extracted.y, direction.theta_deg, phi, taper);
        const cdouble b = profile_at(bx.cwiseProduct(by), extracted.x.freqs, 2.0 * delay_s);
        const double mag = std::sqrt(std::abs(b));
        if (!(mag > 0.0) || !std::isfinite(mag))
            throw NumericalError("extracted path has no power at the detected peak");

        cdouble alpha = std::polar(mag, 0.5 * std::arg(b));
        const cdouble ref = profile_at(bx, extracted.x.freqs, delay_s);
        if (std::real(alpha * std::conj(ref)) < 0.0)
            alpha = -alpha;
        return alpha;
    }

    CfrSet subtract_path(const CfrSet &residual, const PathComponent &path)
    {
        CfrSet out = residual;
        out.values -= synthesize_like(residual, {path}).values;
        return out;
    }

    MaCfr subtract_path(const MaCfr &residual, const PathComponent &path)
    {
        return {subtract_path(residual.x, path), subtract_path(residual.y, path)};
    }

    namespace
    {
        struct GatedExtraction
        {
            CfrSet cfr;
            CfrSet synthetic; // unit path through the same gate
            DelayGate gate;
            double mismatch = 0.0; // relative misfit of the beamformed gated profile to one path
        };

        GatedExtraction gate_subarray(const CfrSet &residual, const CMatrix &residual_cir, const DelayTransform &tr,
                                      const Direction &dir, double tau, double gate_db, const std::optional<Taper> &taper)
        {
            const PathComponent unit{cdouble(1.0), dir, tau};
            const CfrSet synthetic = synthesize_like(residual, {unit});

            GatedExtraction g;
            g.gate = build_label_vector(tr.inverse_rows(synthetic.values), gate_db);
            g.cfr = residual;
            g.cfr.values = tr.forward_rows(extract_path_cir(residual_cir, g.gate));

            // Compare the directional profiles of the extraction and of a single path fitted at tau
            const std::vector<double> phi{dir.phi_deg};
            const CMatrix p_ext = tr.inverse_rows(beam_spectra_subarray(g.cfr, dir.theta_deg, phi, taper));
            const CMatrix syn_gated = tr.forward_rows(extract_path_cir(tr.inverse_rows(synthetic.values), g.gate));
            g.synthetic = residual;
            g.synthetic.values = syn_gated;
            const CMatrix p_syn = tr.inverse_rows(beam_spectra_subarray(g.synthetic, dir.theta_deg, phi, taper));
            const Eigen::Index k = Eigen::Index(std::llround(tau / tr.bin_width())) % p_syn.cols();
            const cdouble scale = std::abs(p_syn(0, k)) > 0.0 ? p_ext(0, k) / p_syn(0, k) : cdouble(0.0);
            const double ref = (scale * p_syn).squaredNorm();
            g.mismatch = ref > 0.0 ? (p_ext - scale * p_syn).squaredNorm() / ref : 0.0;
            return g;
        }

        constexpr double joint_mismatch = 0.1; // -10 dB

        bool below_range(double amplitude, double alpha_max, double epsilon_db)
        {
            return amplitude <= alpha_max * std::pow(10.0, -epsilon_db / 20.0);
        }

        // Shared loop: `step` runs one detection on the residual and returns the candidate,
        // `subtract` removes an accepted path.
        template <typename Residual, typename Step, typename Subtract, typename Energy>
        EstimationReport successive(Residual residual, const EstimatorConfig &config, Step step, Subtract subtract, Energy energy)
        {
            EstimationReport report;
            double alpha_max = 0.0;
            for (std::size_t iteration = 1;; ++iteration)
            {
                if (report.paths.size() >= config.max_iterations)
                {
                    report.stop_reason = StopReason::max_iterations;
                    break;
                }

                IterationDiagnostics diag;
                diag.iteration = iteration;
                PathComponent candidate;
                try
                {
                    candidate = step(residual, diag, report);
                }
                catch (const NumericalError &)
                {
                    if (iteration == 1)
                        throw;
                    report.stop_reason = StopReason::dynamic_range; // nothing left to detect
                    break;
                }

                const double mag = std::abs(candidate.amplitude);
                diag.candidate_db = to_db20(mag);
                if (iteration == 1)
                    alpha_max = mag;
                else if (below_range(mag, alpha_max, config.epsilon_db))
                {
                    report.diagnostics.push_back(diag);
                    report.stop_reason = StopReason::dynamic_range;
                    break;
                }

                diag.accepted = true;
                report.diagnostics.push_back(diag);
                residual = subtract(residual, candidate);

                EstimatedPath e;
                e.amplitude = candidate.amplitude;
                e.amplitude_db = to_db20(mag);
                e.direction = candidate.direction;
                e.delay_s = candidate.delay_s;
                e.iteration = iteration;
                e.residual_energy_after = energy(residual);
                report.paths.push_back(e);
            }
            return report;
        }

        void gate_diagnostics(IterationDiagnostics &diag, const DelayGate &gate, const DelayTransform &tr)
        {
            diag.gated_bins = gate.count(0);
            bool first = true;
            for (std::size_t k = 0; k < gate.bins; ++k)
                if (gate.at(0, k))
                {
                    if (first)
                        diag.gate_start_s = tr.delays()[k];
                    diag.gate_stop_s = tr.delays()[k];
                    first = false;
                }
        }
    } // namespace

    EstimationReport run_sic(const MaCfr &cfr, const EstimatorConfig &config)
    {
        config.validate();
        cfr.validate();
        if (!(cfr.energy() > 0.0))
            throw NumericalError("no signal: the MA CFR is all zero");

        const FrequencyGrid &freqs = cfr.x.freqs;
        const DelayTransform tr(freqs, config.pad_factor);
        const AngularGrid grid{AngularGrid::Kind::theta_phi, config.scan.theta_axis, config.scan.phi_axis};
        const double f_center = freqs.at(freqs.center_index());

        auto step = [&](const MaCfr &residual, IterationDiagnostics &diag, EstimationReport &report)
        {
            const BeamPattern beam = cbf_ma(residual, grid, f_center, config.taper);
            const Direction coarse = detect_strongest(beam);
            diag.beam_peak_db = strongest(beam).level_db;

            const Padp padp = padp_ma(residual, coarse.theta_deg, config.scan.phi_axis, config.pad_factor, config.taper);
            if (config.keep_snapshots)
                report.snapshots.push_back(padp);

            // Candidate peaks: the global maximum first, then further local maxima in descending order
            std::vector<PadpRefinement> candidates{refine_on_padp(padp)};
            for (const Peak &p : find_peaks(padp, config.epsilon_db))
            {
                if (candidates.size() >= config.candidate_peaks)
                    break;
                if (p.row == candidates.front().peak.row && p.col == candidates.front().peak.col)
                    continue;
                PadpRefinement r;
                r.peak = p;
                r.phi_deg = padp.phi_axis[p.col];
                r.peak_delay_s = padp.delay_axis[p.row];
                r.delay_s = 0.5 * r.peak_delay_s;
                candidates.push_back(r);
            }

            const CMatrix cir_x = tr.inverse_rows(residual.x.values);
            const CMatrix cir_y = tr.inverse_rows(residual.y.values);
            const double gate_db = config.gate_threshold_db();

            std::optional<PathComponent> best;
            for (std::size_t rank = 0; rank < candidates.size(); ++rank)
            {
                const PadpRefinement &r = candidates[rank];
                const Direction dir{coarse.theta_deg, r.phi_deg};
                const GatedExtraction gx = gate_subarray(residual.x, cir_x, tr, dir, r.delay_s, gate_db, config.taper);
                const GatedExtraction gy = gate_subarray(residual.y, cir_y, tr, dir, r.delay_s, gate_db, config.taper);

                // The gate trims the sidelobes of the path itself; dividing by the gated unit path undoes that loss
                cdouble alpha = 0.0;
                try
                {
                    alpha = estimate_power({gx.cfr, gy.cfr}, dir, r.delay_s, config.taper) /
                            estimate_power({gx.synthetic, gy.synthetic}, dir, r.delay_s, config.taper);
                }
                catch (const NumericalError &)
                {
                    continue; // nothing of this peak survives the gate
                }

                if (best && !(std::abs(alpha) > std::abs(best->amplitude)))
                    continue;
                best = PathComponent{alpha, dir, r.delay_s};
                diag.theta_deg = dir.theta_deg;
                diag.phi_deg = dir.phi_deg;
                diag.peak_delay_s = r.peak_delay_s;
                diag.padp_peak_db = r.peak.level_db;
                diag.candidate_rank = rank;
                gate_diagnostics(diag, gx.gate, tr);
                diag.joint_estimate = gx.mismatch > joint_mismatch || gy.mismatch > joint_mismatch;
            }
            diag.candidates_tried = candidates.size();
            if (!best)
                throw NumericalError("no PADP peak carries power after delay gating");
            return *best;
        };
        auto subtract = [](const MaCfr &residual, const PathComponent &p) { return subtract_path(residual, p); };
        auto energy = [](const MaCfr &residual) { return residual.energy(); };
        return successive(cfr, config, step, subtract, energy);
    }

    EstimationReport estimate_ura_paths(const CfrSet &cfr, const EstimatorConfig &config)
    {
        config.validate();
        cfr.validate();
        if (cfr.layout != CfrLayout::ura)
            throw ValidationError("estimate_ura_paths expects a URA CFR");
        if (!(cfr.energy() > 0.0))
            throw NumericalError("no signal: the URA CFR is all zero");

        const AngularGrid grid{AngularGrid::Kind::theta_phi, config.scan.theta_axis, config.scan.phi_axis};
        const double f_center = cfr.freqs.at(cfr.freqs.center_index());

        auto step = [&](const CfrSet &residual, IterationDiagnostics &diag, EstimationReport &report)
        {
            const BeamPattern beam = cbf_ura(residual, grid, f_center, config.taper);
            const Peak bp = strongest(beam);
            const double theta = grid.axis0[bp.row];
            diag.beam_peak_db = bp.level_db;

            const Padp padp = padp_ura(residual, theta, config.scan.phi_axis, config.pad_factor, config.taper);
            const PadpRefinement r = refine_on_padp(padp);
            if (config.keep_snapshots)
                report.snapshots.push_back(padp);

            diag.theta_deg = theta;
            diag.phi_deg = r.phi_deg;
            diag.peak_delay_s = r.peak_delay_s;
            diag.padp_peak_db = r.peak.level_db;
            return PathComponent{padp.at(r.peak.row, r.peak.col), {theta, r.phi_deg}, r.delay_s};
        };
        auto subtract = [](const CfrSet &residual, const PathComponent &p) { return subtract_path(residual, p); };
        auto energy = [](const CfrSet &residual) { return residual.energy(); };
        return successive(cfr, config, step, subtract, energy);
    }
} // namespace masound
