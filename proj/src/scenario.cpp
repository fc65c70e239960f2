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

#include "masound/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace masound
{
    using nlohmann::json;

    Taper TaperSpec::for_ura(std::size_t m_count, std::size_t n_count) const
    {
        switch (kind)
        {
        case Kind::uniform:
            return {ExcitationVector::uniform(m_count), ExcitationVector::uniform(n_count)};
        case Kind::chebyshev:
            return {chebyshev_taper(m_count, sidelobe_db), chebyshev_taper(n_count, sidelobe_db)};
        case Kind::custom:
            if (x.size() != m_count || y.size() != n_count)
                throw ValidationError("custom taper needs " + std::to_string(m_count) + " x-weights and " + std::to_string(n_count) + " y-weights");
            return {ExcitationVector::real(x), ExcitationVector::real(y)};
        }
        return {};
    }

    Taper TaperSpec::for_ma(std::size_t x_count, std::size_t y_count) const
    {
        if (kind == Kind::uniform)
            return {ExcitationVector::uniform(x_count), ExcitationVector::uniform(y_count)};
        if (kind == Kind::custom && !ma_x.empty())
        {
            if (ma_x.size() != x_count || ma_y.size() != y_count)
                throw ValidationError("custom MA taper needs " + std::to_string(x_count) + " x-weights and " + std::to_string(y_count) + " y-weights");
            return {ExcitationVector::real(ma_x), ExcitationVector::real(ma_y)};
        }
        const std::size_t m = (x_count + 1) / 2, n = (y_count + 1) / 2;
        if (m % 2 == 0 || n % 2 == 0)
            throw ValidationError("an MA taper derived from a URA taper needs (count + 1) / 2 odd on both sub-arrays");
        const Taper base = for_ura(m, n);
        return {auto_convolve(base.x), auto_convolve(base.y)};
    }

    void Scenario::validate() const
    {
        if (!ura && !ma)
            throw ValidationError("scenario needs a 'ura' and/or an 'ma' array");
        if (ura)
            ura->validate();
        if (ma)
            ma->validate();
        if (!(phase.ref_freq_hz > 0.0) || !std::isfinite(phase.ref_freq_hz))
            throw ValidationError("frequency.ref_freq_hz must be positive");
        check_paths(paths, freqs);
        estimator.validate();
        estimator.scan.validate();
        if (pattern.lattice < 2 || beamscan.lattice < 2)
            throw ValidationError("lattice sizes must be >= 2");
        if (std::abs(pattern.steer_u) > 1.0 || std::abs(pattern.steer_v) > 1.0)
            throw ValidationError("pattern.steer_u and pattern.steer_v must lie in [-1, 1]");
        if (beamscan.theta_deg && !(*beamscan.theta_deg >= 0.0 && *beamscan.theta_deg <= 90.0))
            throw ValidationError("beamscan.theta_deg must lie in [0, 90]");
        if (beamscan.max_delay_ns && !(*beamscan.max_delay_ns > 0.0))
            throw ValidationError("beamscan.max_delay_ns must be positive");
        if (beamscan.padp_separation_ns && !(*beamscan.padp_separation_ns >= 0.0))
            throw ValidationError("beamscan.padp_separation_ns must be non-negative");
        if (!(beamscan.peak_range_db > 0.0))
            throw ValidationError("beamscan.peak_range_db must be positive");
        for (const TaperSpec *t : {&pattern.taper, &beamscan.taper})
        {
            if (ura)
                t->for_ura(ura->m_count, ura->n_count);
            if (ma)
                t->for_ma(ma->x_count, ma->y_count);
        }
        if (noise.snr_db && std::isnan(*noise.snr_db))
            throw ValidationError("noise.snr_db must be a number");
    }

    namespace
    {
        // Field access with path-qualified messages and rejection of unknown keys
        class Fields
        {
        public:
            Fields(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw ValidationError("field '" + path_ + "' must be an object");
            }

            const std::string &path() const { return path_; }
            bool has(const std::string &key) const { return j_.contains(key) && !j_.at(key).is_null(); }
            std::string at(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            const json &raw(const std::string &key)
            {
                used_.insert(key);
                if (!has(key))
                    throw ValidationError("missing field '" + at(key) + "'");
                return j_.at(key);
            }

            double number(const std::string &key)
            {
                const json &v = raw(key);
                if (!v.is_number())
                    throw ValidationError("field '" + at(key) + "' must be a number");
                return v.get<double>();
            }

            double number(const std::string &key, double fallback) { return has(key) ? number(key) : (used_.insert(key), fallback); }

            std::optional<double> optional_number(const std::string &key)
            {
                used_.insert(key);
                if (!has(key))
                    return std::nullopt;
                return number(key);
            }

            std::size_t count(const std::string &key)
            {
                const json &v = raw(key);
                if (!v.is_number_unsigned())
                    throw ValidationError("field '" + at(key) + "' must be a non-negative integer");
                return v.get<std::size_t>();
            }

            std::size_t count(const std::string &key, std::size_t fallback) { return has(key) ? count(key) : (used_.insert(key), fallback); }

            bool flag(const std::string &key, bool fallback)
            {
                used_.insert(key);
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_boolean())
                    throw ValidationError("field '" + at(key) + "' must be true or false");
                return j_.at(key).get<bool>();
            }

            std::string text(const std::string &key, const std::string &fallback)
            {
                used_.insert(key);
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_string())
                    throw ValidationError("field '" + at(key) + "' must be a string");
                return j_.at(key).get<std::string>();
            }

            std::vector<double> numbers(const std::string &key)
            {
                const json &v = raw(key);
                if (!v.is_array())
                    throw ValidationError("field '" + at(key) + "' must be an array of numbers");
                std::vector<double> out;
                for (const auto &e : v)
                {
                    if (!e.is_number())
                        throw ValidationError("field '" + at(key) + "' must be an array of numbers");
                    out.push_back(e.get<double>());
                }
                return out;
            }

            // A range {start, stop, step} or an explicit array
            std::vector<double> axis(const std::string &key, const std::vector<double> &fallback)
            {
                used_.insert(key);
                if (!has(key))
                    return fallback;
                if (j_.at(key).is_array())
                    return numbers(key);
                Fields r(j_.at(key), at(key));
                const double start = r.number("start"), stop = r.number("stop"), step = r.number("step");
                r.finish();
                return linear_axis(start, stop, step);
            }

            std::optional<Fields> object(const std::string &key)
            {
                used_.insert(key);
                if (!has(key))
                    return std::nullopt;
                return Fields(j_.at(key), at(key));
            }

            void finish() const
            {
                for (const auto &item : j_.items())
                    if (!used_.count(item.key()))
                        throw ValidationError("unknown field '" + at(item.key()) + "'");
            }

        private:
            const json &j_;
            std::string path_;
            std::set<std::string> used_;
        };

        TaperSpec parse_taper(std::optional<Fields> f)
        {
            TaperSpec t;
            if (!f)
                return t;
            const std::string type = f->text("type", "uniform");
            if (type == "uniform" || type == "none")
                t.kind = TaperSpec::Kind::uniform;
            else if (type == "chebyshev")
                t.kind = TaperSpec::Kind::chebyshev;
            else if (type == "custom")
                t.kind = TaperSpec::Kind::custom;
            else
                throw ValidationError("field '" + f->at("type") + "' must be uniform, chebyshev or custom");
            t.sidelobe_db = f->number("sidelobe_db", 30.0);
            if (t.kind == TaperSpec::Kind::custom)
            {
                t.x = f->numbers("x");
                t.y = f->numbers("y");
                if (f->has("ma_x") || f->has("ma_y"))
                {
                    t.ma_x = f->numbers("ma_x");
                    t.ma_y = f->numbers("ma_y");
                }
            }
            if (t.kind == TaperSpec::Kind::chebyshev && !(t.sidelobe_db > 0.0))
                throw ValidationError("field '" + f->at("sidelobe_db") + "' must be positive");
            f->finish();
            return t;
        }

        PathComponent parse_path(Fields f)
        {
            const double theta = f.number("theta_deg"), phi = f.number("phi_deg");
            double delay = 0.0;
            if (f.has("delay_ns") == f.has("delay_s"))
                throw ValidationError("field '" + f.path() + "' needs exactly one of delay_ns / delay_s");
            delay = f.has("delay_ns") ? f.number("delay_ns") * 1e-9 : f.number("delay_s");
            f.optional_number("delay_ns");
            f.optional_number("delay_s");

            PathComponent p;
            if (f.has("power_db"))
            {
                if (f.has("amplitude_re") || f.has("amplitude_im"))
                    throw ValidationError("field '" + f.path() + "' mixes power_db with amplitude_re/amplitude_im");
                p = PathComponent::from_db(f.number("power_db"), theta, phi, delay, f.number("phase_deg", 0.0));
            }
            else
            {
                p.amplitude = cdouble(f.number("amplitude_re"), f.number("amplitude_im", 0.0));
                p.direction = {theta, phi};
                p.delay_s = delay;
            }
            f.finish();
            p.validate();
            return p;
        }

        nlohmann::ordered_json taper_json(const TaperSpec &t)
        {
            nlohmann::ordered_json j;
            switch (t.kind)
            {
            case TaperSpec::Kind::uniform:
                j["type"] = "uniform";
                break;
            case TaperSpec::Kind::chebyshev:
                j["type"] = "chebyshev";
                j["sidelobe_db"] = t.sidelobe_db;
                break;
            case TaperSpec::Kind::custom:
                j["type"] = "custom";
                j["x"] = t.x;
                j["y"] = t.y;
                if (!t.ma_x.empty())
                {
                    j["ma_x"] = t.ma_x;
                    j["ma_y"] = t.ma_y;
                }
                break;
            }
            return j;
        }

        Scenario from_json(const json &root)
        {
            Scenario s;
            Fields top(root, "");
            s.name = top.text("name", "scenario");

            {
                auto fo = top.object("frequency");
                if (!fo)
                    throw ValidationError("missing field 'frequency'");
                Fields &f = *fo;
                const double f_start = f.number("f_start_hz");
                const std::size_t n = f.count("n_points");
                if (f.has("f_stop_hz") == f.has("bandwidth_hz"))
                    throw ValidationError("field 'frequency' needs exactly one of f_stop_hz / bandwidth_hz");
                s.freqs = f.has("bandwidth_hz") ? FrequencyGrid::from_band(f_start, f.number("bandwidth_hz"), n)
                                                : FrequencyGrid(f_start, f.number("f_stop_hz"), n);
                f.optional_number("f_stop_hz");
                f.optional_number("bandwidth_hz");
                s.phase.ref_freq_hz = f.number("ref_freq_hz", s.freqs.center());
                s.phase.narrowband = f.flag("narrowband_phase", true);
                f.finish();
            }

            if (auto f = top.object("ura"))
            {
                UraGeometry g;
                g.m_count = f->count("m");
                g.n_count = f->count("n");
                g.dx = f->number("dx_wl", 0.5);
                g.dy = f->number("dy_wl", g.dx);
                f->finish();
                s.ura = g;
            }
            if (auto f = top.object("ma"))
            {
                MaGeometry g;
                g.x_count = f->count("x_count");
                g.y_count = f->count("y_count");
                g.d = f->number("d_wl", 0.5);
                f->finish();
                s.ma = g;
            }

            if (top.has("paths"))
            {
                const json &arr = top.raw("paths");
                if (!arr.is_array())
                    throw ValidationError("field 'paths' must be an array");
                for (std::size_t i = 0; i < arr.size(); ++i)
                    s.paths.push_back(parse_path(Fields(arr[i], "paths[" + std::to_string(i) + "]")));
            }
            else
                top.optional_number("paths");

            const ScanGrid def = ScanGrid::make_default(s.freqs, 4);
            s.estimator.scan = def;
            std::size_t pad = 4;
            if (auto f = top.object("scan"))
            {
                s.estimator.scan.theta_axis = f->axis("theta_deg", def.theta_axis);
                s.estimator.scan.phi_axis = f->axis("phi_deg", def.phi_axis);
                pad = f->count("pad_factor", 4);
                f->finish();
            }
            if (pad < 1)
                throw ValidationError("field 'scan.pad_factor' must be >= 1");
            s.estimator.pad_factor = pad;
            s.estimator.scan.delay_axis = delay_axis(s.freqs, pad);

            if (auto f = top.object("estimator"))
            {
                s.estimator.epsilon_db = f->number("epsilon_db", 30.0);
                s.estimator.max_iterations = f->count("max_iterations", 10);
                s.estimator.gate_db = f->optional_number("gate_db");
                s.estimator.candidate_peaks = f->count("candidate_peaks", 8);
                f->finish();
            }

            if (auto f = top.object("pattern"))
            {
                s.pattern.steer_u = f->number("steer_u", 0.0);
                s.pattern.steer_v = f->number("steer_v", 0.0);
                s.pattern.lattice = f->count("lattice", 512);
                s.pattern.taper = parse_taper(f->object("taper"));
                f->finish();
            }

            if (auto f = top.object("beamscan"))
            {
                s.beamscan.theta_deg = f->optional_number("theta_deg");
                s.beamscan.lattice = f->count("lattice", 512);
                s.beamscan.max_delay_ns = f->optional_number("max_delay_ns");
                s.beamscan.taper = parse_taper(f->object("taper"));
                s.beamscan.peak_range_db = f->number("peak_range_db", 20.0);
                s.beamscan.peak_separation = f->count("peak_separation", 3);
                s.beamscan.padp_separation_ns = f->optional_number("padp_separation_ns");
                f->finish();
            }

            if (auto f = top.object("noise"))
            {
                s.noise.snr_db = f->optional_number("snr_db");
                s.noise.seed = f->count("seed", 1);
                f->finish();
            }

            top.finish();
            s.validate();
            return s;
        }
    } // namespace

    Scenario parse_scenario_text(const std::string &text, const std::string &source)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            // Translate the byte offset into line:column
            std::size_t line = 1, col = 1;
            for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                    ++col;
            }
            throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON parse error: " + e.what());
        }
        try
        {
            return from_json(root);
        }
        catch (const ValidationError &e)
        {
            throw ValidationError(source + ": " + e.what());
        }
    }

    Scenario parse_scenario(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw IoError("cannot open scenario '" + file.string() + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_scenario_text(ss.str(), file.string());
    }

    nlohmann::ordered_json dump_scenario(const Scenario &s)
    {
        nlohmann::ordered_json j;
        j["name"] = s.name;
        j["frequency"] = {{"f_start_hz", s.freqs.f_start()},
                          {"f_stop_hz", s.freqs.f_stop()},
                          {"n_points", s.freqs.size()},
                          {"ref_freq_hz", s.phase.ref_freq_hz},
                          {"narrowband_phase", s.phase.narrowband}};
        if (s.ura)
            j["ura"] = {{"m", s.ura->m_count}, {"n", s.ura->n_count}, {"dx_wl", s.ura->dx}, {"dy_wl", s.ura->dy}};
        if (s.ma)
            j["ma"] = {{"x_count", s.ma->x_count}, {"y_count", s.ma->y_count}, {"d_wl", s.ma->d}};

        j["paths"] = nlohmann::ordered_json::array();
        for (const auto &p : s.paths)
            j["paths"].push_back({{"amplitude_re", p.amplitude.real()},
                                  {"amplitude_im", p.amplitude.imag()},
                                  {"theta_deg", p.direction.theta_deg},
                                  {"phi_deg", p.direction.phi_deg},
                                  {"delay_s", p.delay_s}});

        j["scan"] = {{"theta_deg", s.estimator.scan.theta_axis},
                     {"phi_deg", s.estimator.scan.phi_axis},
                     {"pad_factor", s.estimator.pad_factor}};
        j["estimator"] = {{"epsilon_db", s.estimator.epsilon_db},
                          {"max_iterations", s.estimator.max_iterations},
                          {"gate_db", s.estimator.gate_db ? nlohmann::ordered_json(*s.estimator.gate_db) : nlohmann::ordered_json(nullptr)},
                          {"candidate_peaks", s.estimator.candidate_peaks}};
        j["pattern"] = {{"steer_u", s.pattern.steer_u},
                        {"steer_v", s.pattern.steer_v},
                        {"lattice", s.pattern.lattice},
                        {"taper", taper_json(s.pattern.taper)}};
        nlohmann::ordered_json b;
        b["theta_deg"] = s.beamscan.theta_deg ? nlohmann::ordered_json(*s.beamscan.theta_deg) : nlohmann::ordered_json(nullptr);
        b["lattice"] = s.beamscan.lattice;
        b["max_delay_ns"] = s.beamscan.max_delay_ns ? nlohmann::ordered_json(*s.beamscan.max_delay_ns) : nlohmann::ordered_json(nullptr);
        b["taper"] = taper_json(s.beamscan.taper);
        b["peak_range_db"] = s.beamscan.peak_range_db;
        b["peak_separation"] = s.beamscan.peak_separation;
        b["padp_separation_ns"] = s.beamscan.padp_separation_ns ? nlohmann::ordered_json(*s.beamscan.padp_separation_ns) : nlohmann::ordered_json(nullptr);
        j["beamscan"] = b;
        j["noise"] = {{"snr_db", s.noise.snr_db ? nlohmann::ordered_json(*s.noise.snr_db) : nlohmann::ordered_json(nullptr)},
                      {"seed", s.noise.seed}};
        return j;
    }
} // namespace masound
