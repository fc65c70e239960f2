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

#include "masound/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace masound
{
    std::string format_exact(double value)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }

    std::string format_sig9(double value)
    {
        if (!std::isfinite(value))
            return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
        int decimals = 8;
        if (value != 0.0)
        {
            const int exponent = int(std::floor(std::log10(std::abs(value))));
            decimals = std::clamp(8 - exponent, 0, 15);
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
        std::string s = buf;
        if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos)
            s.erase(0, s[0] == '-' ? 1 : 0); // no negative zero
        return s;
    }

    std::string format_level(double level_db)
    {
        return format_sig9(std::isnan(level_db) ? level_db : std::max(level_db, -300.0));
    }

    CsvWriter::CsvWriter(const std::filesystem::path &file, const std::vector<std::string> &header) : file_(file), out_(file)
    {
        if (!out_)
            throw IoError("cannot open '" + file.string() + "' for writing");
        row(header);
    }

    void CsvWriter::row(const std::vector<std::string> &fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            if (i)
                out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    void CsvWriter::close()
    {
        out_.close();
        if (!out_)
            throw IoError("failed writing '" + file_.string() + "'");
    }

    void write_cfr(const std::filesystem::path &file, const CfrSet &cfr)
    {
        cfr.validate();
        std::ofstream out(file);
        if (!out)
            throw IoError("cannot open '" + file.string() + "' for writing");

        out << "# format_version=" << cfr_format_version << '\n'
            << "# layout=" << layout_name(cfr.layout) << '\n'
            << "# f_start_hz=" << format_exact(cfr.freqs.f_start()) << '\n'
            << "# f_stop_hz=" << format_exact(cfr.freqs.f_stop()) << '\n'
            << "# n_freq=" << cfr.freqs.size() << '\n'
            << "# n_elem_x=" << cfr.n_elem_x << '\n'
            << "# n_elem_y=" << cfr.n_elem_y << '\n'
            << "# spacing_wl=" << format_exact(cfr.spacing_x) << '\n';
        if (cfr.spacing_y != cfr.spacing_x)
            out << "# spacing_y_wl=" << format_exact(cfr.spacing_y) << '\n';
        out << "# ref_freq_hz=" << format_exact(cfr.phase.ref_freq_hz) << '\n';
        if (!cfr.phase.narrowband)
            out << "# narrowband_phase=false\n";
        out << "elem_index_x,elem_index_y,freq_index,re,im\n";

        for (std::size_t e = 0; e < cfr.elements(); ++e)
            for (std::size_t l = 0; l < cfr.freqs.size(); ++l)
            {
                const cdouble v = cfr.values(Eigen::Index(e), Eigen::Index(l));
                out << cfr.index_x(e) << ',' << cfr.index_y(e) << ',' << l << ',' << format_exact(v.real()) << ','
                    << format_exact(v.imag()) << '\n';
            }
        out.close();
        if (!out)
            throw IoError("failed writing '" + file.string() + "'");
    }

    namespace
    {
        [[noreturn]] void bad(const std::filesystem::path &file, std::size_t line, const std::string &what)
        {
            throw ValidationError(file.string() + ":" + std::to_string(line) + ": " + what);
        }

        template <typename T>
        T parse_number(const std::string &text, const std::filesystem::path &file, std::size_t line, const std::string &field)
        {
            T value{};
            const char *first = text.data(), *last = text.data() + text.size();
            if constexpr (std::is_floating_point_v<T>)
            {
                // strtod accepts the full %.17g output including inf/nan spellings
                char *end = nullptr;
                value = std::strtod(text.c_str(), &end);
                if (text.empty() || end != text.c_str() + text.size())
                    bad(file, line, "cannot parse " + field + " '" + text + "'");
            }
            else
            {
                const auto [ptr, ec] = std::from_chars(first, last, value);
                if (ec != std::errc() || ptr != last)
                    bad(file, line, "cannot parse " + field + " '" + text + "'");
            }
            return value;
        }
    } // namespace

    CfrSet read_cfr(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw IoError("cannot open '" + file.string() + "'");

        std::map<std::string, std::pair<std::string, std::size_t>> header;
        std::string text;
        std::size_t line = 0;
        bool columns = false;
        while (std::getline(in, text))
        {
            ++line;
            if (!text.empty() && text.back() == '\r')
                text.pop_back();
            if (text.empty())
                continue;
            if (text[0] != '#')
            {
                if (text != "elem_index_x,elem_index_y,freq_index,re,im")
                    bad(file, line, "expected column header 'elem_index_x,elem_index_y,freq_index,re,im'");
                columns = true;
                break;
            }
            const std::size_t eq = text.find('=');
            if (eq == std::string::npos)
                bad(file, line, "header line without '='");
            std::size_t b = 1;
            while (b < eq && text[b] == ' ')
                ++b;
            header[text.substr(b, eq - b)] = {text.substr(eq + 1), line};
        }
        if (!columns)
            bad(file, line, "missing column header");

        auto need = [&](const std::string &key) -> const std::pair<std::string, std::size_t> &
        {
            const auto it = header.find(key);
            if (it == header.end())
                throw ValidationError(file.string() + ": missing header key '" + key + "'");
            return it->second;
        };
        auto as_size = [&](const std::string &key)
        {
            const auto &[v, ln] = need(key);
            return parse_number<std::size_t>(v, file, ln, key);
        };
        auto as_double = [&](const std::string &key)
        {
            const auto &[v, ln] = need(key);
            return parse_number<double>(v, file, ln, key);
        };

        static const char *known[] = {"format_version", "layout", "f_start_hz", "f_stop_hz", "n_freq", "n_elem_x",
                                      "n_elem_y", "spacing_wl", "spacing_y_wl", "ref_freq_hz", "narrowband_phase"};
        for (const auto &[key, value] : header)
            if (std::find(std::begin(known), std::end(known), key) == std::end(known))
                bad(file, value.second, "unknown header key '" + key + "'");

        const int version = int(as_size("format_version"));
        if (version != cfr_format_version)
            throw ValidationError(file.string() + ": format_version " + std::to_string(version) + " is not supported (expected " +
                                  std::to_string(cfr_format_version) + ")");

        CfrSet cfr;
        cfr.layout = layout_from_name(need("layout").first);
        cfr.freqs = FrequencyGrid(as_double("f_start_hz"), as_double("f_stop_hz"), as_size("n_freq"));
        cfr.n_elem_x = as_size("n_elem_x");
        cfr.n_elem_y = as_size("n_elem_y");
        cfr.spacing_x = as_double("spacing_wl");
        cfr.spacing_y = header.count("spacing_y_wl") ? as_double("spacing_y_wl") : cfr.spacing_x;
        cfr.phase.ref_freq_hz = as_double("ref_freq_hz");
        if (header.count("narrowband_phase"))
        {
            const std::string &v = header["narrowband_phase"].first;
            if (v != "true" && v != "false")
                bad(file, header["narrowband_phase"].second, "narrowband_phase must be true or false");
            cfr.phase.narrowband = v == "true";
        }
        if (!(cfr.phase.ref_freq_hz > 0.0))
            throw ValidationError(file.string() + ": ref_freq_hz must be positive");

        const std::size_t E = cfr.elements(), L = cfr.freqs.size();
        cfr.values = CMatrix::Zero(Eigen::Index(E), Eigen::Index(L));
        cfr.validate();
        std::vector<unsigned char> seen(E * L, 0);
        const long half_x = long(cfr.n_elem_x - 1) / 2, half_y = long(cfr.n_elem_y - 1) / 2;

        std::size_t rows = 0;
        std::string field[5];
        while (std::getline(in, text))
        {
            ++line;
            if (!text.empty() && text.back() == '\r')
                text.pop_back();
            if (text.empty())
                continue;
            std::stringstream ss(text);
            int n = 0;
            while (n < 5 && std::getline(ss, field[n], ','))
                ++n;
            std::string extra;
            if (n != 5 || std::getline(ss, extra))
                bad(file, line, "expected 5 comma-separated fields");

            const long ix = parse_number<long>(field[0], file, line, "elem_index_x");
            const long iy = parse_number<long>(field[1], file, line, "elem_index_y");
            const std::size_t l = parse_number<std::size_t>(field[2], file, line, "freq_index");
            if (ix < -half_x || ix > half_x || iy < -half_y || iy > half_y || l >= L)
                bad(file, line, "dimension mismatch: row index outside the header dimensions");
            const std::size_t e = cfr.element_row(std::size_t(ix + half_x), std::size_t(iy + half_y));
            if (seen[e * L + l])
                bad(file, line, "duplicate row for element (" + field[0] + "," + field[1] + ") frequency " + field[2]);
            seen[e * L + l] = 1;
            cfr.values(Eigen::Index(e), Eigen::Index(l)) =
                cdouble(parse_number<double>(field[3], file, line, "re"), parse_number<double>(field[4], file, line, "im"));
            ++rows;
        }
        if (rows != E * L)
            throw ValidationError(file.string() + ": dimension mismatch: header declares " + std::to_string(E) + " elements x " +
                                  std::to_string(L) + " frequencies, body has " + std::to_string(rows) + " rows");
        return cfr;
    }

    MaCfr read_ma_cfr(const std::filesystem::path &file_x, const std::filesystem::path &file_y)
    {
        MaCfr out{read_cfr(file_x), read_cfr(file_y)};
        out.validate();
        return out;
    }
} // namespace masound
