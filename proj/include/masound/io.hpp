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

#ifndef MASOUND_IO_HPP
#define MASOUND_IO_HPP

#include "masound/channel.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace masound
{
    inline constexpr int cfr_format_version = 1;

    // CFR text file: `# key=value` header lines, then CSV rows
    // elem_index_x,elem_index_y,freq_index,re,im with signed element indices.
    void write_cfr(const std::filesystem::path &file, const CfrSet &cfr);
    CfrSet read_cfr(const std::filesystem::path &file);

    // Reads an (ma_x, ma_y) pair and checks that the two sub-arrays share a grid
    MaCfr read_ma_cfr(const std::filesystem::path &file_x, const std::filesystem::path &file_y);

    // Fixed notation with 9 significant digits; -inf and levels below -300 are clamped to -300
    std::string format_sig9(double value);
    std::string format_level(double level_db);

    // Shortest text that parses back to the same double (17 significant digits)
    std::string format_exact(double value);

    class CsvWriter
    {
    public:
        CsvWriter(const std::filesystem::path &file, const std::vector<std::string> &header);
        void row(const std::vector<std::string> &fields);
        void close();

    private:
        std::filesystem::path file_;
        std::ofstream out_;
    };
} // namespace masound

#endif
