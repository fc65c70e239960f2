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

// masound command line: synth-pattern, simulate, beamscan, estimate, compare

#include "masound/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace
{
    enum ExitCode
    {
        ok = 0,
        validation = 2,
        numerical = 3,
        io = 4
    };

    struct Common
    {
        std::string config;
        std::string out = ".";
        std::string input;
        std::uint64_t seed = 0;
        bool quiet = false;
    };

    CLI::App *add_command(CLI::App &app, const std::string &name, const std::string &help, Common &c, bool with_input)
    {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("--config", c.config, "Scenario JSON file")->required();
        sub->add_option("--out", c.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", c.seed, "Noise seed (overrides noise.seed)");
        sub->add_flag("--quiet", c.quiet, "Suppress the summary on stdout");
        if (with_input)
            sub->add_option("--input", c.input, "Directory with cfr_*.csv files (default: synthesize from the scenario)");
        return sub;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"masound - wideband channel sounding with multiplicative arrays"};
    app.require_subcommand(1);
    Common c;
    CLI::App *synth = add_command(app, "synth-pattern", "URA and MA power patterns on a (u, v) lattice", c, false);
    CLI::App *simulate = add_command(app, "simulate", "Write synthetic URA / MA CFR files", c, false);
    CLI::App *beamscan = add_command(app, "beamscan", "Beam patterns and PADPs with their maxima", c, true);
    CLI::App *estimate = add_command(app, "estimate", "Successive interference cancellation on the MA", c, true);
    CLI::App *compare = add_command(app, "compare", "URA CBF vs MA SIC path tables", c, true);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    try
    {
        const masound::Scenario scenario = masound::parse_scenario(c.config);
        masound::CommandOptions options;
        options.out = c.out;
        options.quiet = c.quiet;
        options.log = &std::cout;
        for (CLI::App *sub : {synth, simulate, beamscan, estimate, compare})
            if (sub->parsed() && sub->count("--seed"))
                options.seed = c.seed;
        if (!c.input.empty())
            options.input = c.input;

        if (synth->parsed())
            return masound::cmd_synth_pattern(scenario, options).equivalent ? ok : numerical;
        if (simulate->parsed())
            masound::cmd_simulate(scenario, options);
        else if (beamscan->parsed())
            masound::cmd_beamscan(scenario, options);
        else if (estimate->parsed())
            masound::cmd_estimate(scenario, options);
        else if (compare->parsed())
            masound::cmd_compare(scenario, options);
        return ok;
    }
    catch (const masound::ValidationError &e)
    {
        std::cerr << "validation error: " << e.what() << '\n';
        return validation;
    }
    catch (const masound::NumericalError &e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical;
    }
    catch (const masound::IoError &e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return numerical;
    }
}
