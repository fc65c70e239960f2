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

#include "properties.hpp"

#include <gtest/gtest.h>

using namespace masound::testkit;

namespace
{
    constexpr std::size_t cases = 200;

    void expect_holds(const PropertyOutcome &r)
    {
        EXPECT_EQ(r.cases, cases);
        EXPECT_TRUE(r.ok()) << r.failures << " of " << r.cases << " cases failed; first: " << r.first_failure;
    }
} // namespace

TEST(Properties, TermCountLaw) { expect_holds(check_term_count_law(101, cases)); }

TEST(Properties, CfrSuperposition) { expect_holds(check_cfr_superposition(102, cases)); }

TEST(Properties, BruteForceOracles) { expect_holds(check_oracle_equivalence(103, cases)); }

TEST(Properties, SinglePathMaMatchesUra) { expect_holds(check_single_path_agreement(104, cases)); }

TEST(Properties, SicTerminates) { expect_holds(check_sic_termination(105, cases)); }

TEST(Properties, EstimatedPowersDoNotIncrease) { expect_holds(check_nonincreasing_powers(106, cases)); }

TEST(Properties, OnGridPathsAreRecovered) { expect_holds(check_on_grid_recovery(107, cases)); }
