/*
 * Copyright 2026 The AdaSeek Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include "adaseek/hypervolume.hpp"
#include "adaseek/random.hpp"

using namespace adaseek;

namespace {

// Inclusion-exclusion over all non-empty subsets: each subset contributes
// the box dominated by the componentwise worst of its members.
double inclusion_exclusion(const std::vector<MetricVector>& pts, const std::vector<Metric>& objs,
                           const MetricVector& ref)
{
    const std::size_t n = pts.size();
    double total = 0.0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        double box = 1.0;
        for (Metric m : objs) {
            double worst = maximized(m) ? 1e300 : -1e300;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::uint64_t{1} << i))
                    worst = maximized(m) ? std::min(worst, pts[i].get(m)) : std::max(worst, pts[i].get(m));
            const double side = maximized(m) ? worst - ref.get(m) : ref.get(m) - worst;
            box *= std::max(0.0, side);
        }
        total += (__builtin_popcountll(mask) % 2 == 1 ? 1.0 : -1.0) * box;
    }
    return total;
}

} // namespace

TEST(Hypervolume, TwoPointExample)
{
    std::vector<MetricVector> f = {{0.9, 6, 0}, {0.8, 5, 0}};
    std::vector<Metric> objs = {Metric::quality, Metric::cost};
    EXPECT_NEAR(hypervolume(f, objs, {0.0, 11.0, 0.0}), 5.3, 1e-12);
}

TEST(Hypervolume, SinglePointRectangle)
{
    std::vector<Metric> objs = {Metric::quality, Metric::cost};
    std::vector<MetricVector> f = {{0.7, 3, 0}};
    EXPECT_DOUBLE_EQ(hypervolume(f, objs, {0.0, 10.0, 0.0}), 0.7 * 7.0);
    std::vector<Metric> q = {Metric::quality};
    EXPECT_DOUBLE_EQ(hypervolume(f, q, {0.0, 10.0, 0.0}), 0.7);
}

TEST(Hypervolume, PointsOutsideReferenceContributeNothing)
{
    std::vector<Metric> objs = {Metric::quality, Metric::cost};
    std::vector<MetricVector> f = {{0.7, 12, 0}};
    EXPECT_DOUBLE_EQ(hypervolume(f, objs, {0.0, 10.0, 0.0}), 0.0);
    EXPECT_DOUBLE_EQ(hypervolume(std::vector<MetricVector>{}, objs, {0.0, 10.0, 0.0}), 0.0);
    std::vector<Metric> none;
    EXPECT_THROW(hypervolume(f, none, {}), ArgumentError);
}

TEST(Hypervolume, MatchesInclusionExclusion)
{
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(9);
        std::vector<MetricVector> pts;
        for (std::size_t i = 0; i < n; ++i)
            pts.push_back({std::round(rng.uniform() * 8) / 8, 1 + std::round(rng.uniform() * 8),
                           1 + std::round(rng.uniform() * 8)});
        const MetricVector ref{0.0, 10.5, 10.5};
        for (auto objs : {std::vector<Metric>{Metric::quality, Metric::cost},
                          std::vector<Metric>{Metric::quality, Metric::latency},
                          std::vector<Metric>{Metric::quality, Metric::cost, Metric::latency}})
            EXPECT_NEAR(hypervolume(pts, objs, ref), inclusion_exclusion(pts, objs, ref), 1e-9);
    }
}

TEST(Hypervolume, ReferencePointSpansAllArchives)
{
    ResultArchive a, b;
    Observation o;
    o.config.assignments["x"] = "1";
    o.metrics = {0.5, 4, 2};
    a.append(o);
    o.metrics = {0.5, 1, 9};
    b.append(o);
    std::vector<const ResultArchive*> both = {&a, &b};
    auto ref = reference_point(both);
    EXPECT_DOUBLE_EQ(ref.quality, 0.0);
    EXPECT_DOUBLE_EQ(ref.cost, 4.4);
    EXPECT_DOUBLE_EQ(ref.latency, 9.9);
}

TEST(Hypervolume, FrontierHelperUsesEvaluatorObjectives)
{
    EvaluatorSpec spec;
    spec.objectives = {Metric::quality, Metric::cost};
    std::vector<Observation> front(2);
    front[0].metrics = {0.9, 6, 100};
    front[1].metrics = {0.8, 5, 100};
    EXPECT_NEAR(frontier_hypervolume(front, spec, {0.0, 11.0, 0.0}), 5.3, 1e-12);
}
