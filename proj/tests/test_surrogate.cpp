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

#include "adaseek/surrogate.hpp"

using namespace adaseek;

namespace {

CogCatalog catalog_with(std::vector<std::pair<std::string, int>> cogs)
{
    std::vector<Cog> out;
    for (auto& [id, m] : cogs) {
        Cog c;
        c.id = id;
        c.dynamic = true;
        for (int j = 0; j < m; ++j)
            c.options.push_back({std::string(1, static_cast<char>('A' + j)), {}, Provenance::static_option});
        out.push_back(c);
    }
    return CogCatalog(out);
}

FeedbackEntry entry(std::map<std::string, std::string> a, double score, bool feasible = true, std::int64_t order = 0)
{
    FeedbackEntry e;
    e.config.assignments = std::move(a);
    e.score = score;
    e.feasible = feasible;
    e.metrics.quality = score;
    e.order = order;
    return e;
}

FeedbackSet scores_only(std::vector<std::pair<double, bool>> list)
{
    FeedbackSet f;
    f.scope = {"x"};
    std::int64_t i = 0;
    for (auto [s, ok] : list) {
        f.entries.push_back(entry({{"x", "A"}}, s, ok, i));
        ++i;
    }
    return f;
}

} // namespace

TEST(SplitObservations, QuarterQuantile)
{
    auto f = scores_only({{0.9, true}, {0.7, true}, {0.5, true}, {0.3, true}});
    auto s = split_observations(f, EvaluatorSpec{});
    EXPECT_EQ(s.l, (std::vector<std::size_t>{0}));
    EXPECT_EQ(s.g, (std::vector<std::size_t>{1, 2, 3}));
    EXPECT_DOUBLE_EQ(s.split_score, 0.9);
    EXPECT_FALSE(s.degenerate);
}

TEST(SplitObservations, InfeasibleForcedIntoBadGroup)
{
    auto f = scores_only({{0.9, false}, {0.7, true}, {0.5, true}});
    auto s = split_observations(f, EvaluatorSpec{});
    EXPECT_EQ(s.l, (std::vector<std::size_t>{1}));
    std::vector<std::size_t> g = s.g;
    std::sort(g.begin(), g.end());
    EXPECT_EQ(g, (std::vector<std::size_t>{0, 2}));
}

TEST(SplitObservations, SingleEntry)
{
    auto s = split_observations(scores_only({{0.4, true}}), EvaluatorSpec{});
    EXPECT_EQ(s.l.size(), 1u);
    EXPECT_TRUE(s.g.empty());
}

TEST(SplitObservations, AllInfeasibleIsDegenerate)
{
    auto s = split_observations(scores_only({{0.2, false}, {0.6, false}, {0.1, false}}), EvaluatorSpec{});
    EXPECT_TRUE(s.degenerate);
    EXPECT_EQ(s.l, (std::vector<std::size_t>{1}));
    EXPECT_EQ(s.g.size(), 2u);
}

TEST(SplitObservations, EmptyRejected)
{
    EXPECT_THROW(split_observations(FeedbackSet{}, EvaluatorSpec{}), ArgumentError);
}

TEST(SplitObservations, GroupSizes)
{
    Rng rng(9);
    for (int n = 1; n <= 60; ++n) {
        std::vector<std::pair<double, bool>> list;
        std::size_t feasible = 0;
        for (int i = 0; i < n; ++i) {
            const bool ok = rng.uniform() < 0.7;
            feasible += ok ? 1 : 0;
            list.emplace_back(rng.uniform(), ok);
        }
        auto s = split_observations(scores_only(list), EvaluatorSpec{});
        EXPECT_EQ(s.l.size() + s.g.size(), static_cast<std::size_t>(n));
        if (feasible > 0) {
            EXPECT_EQ(s.l.size(), std::max<std::size_t>(1, (feasible + 3) / 4));
        }
    }
}

TEST(FitDensity, LaplaceSmoothing)
{
    auto cat = catalog_with({{"x", 4}});
    std::vector<FeedbackEntry> e = {entry({{"x", "A"}}, 0), entry({{"x", "A"}}, 0), entry({{"x", "B"}}, 0)};
    std::vector<std::string> scope = {"x"};
    auto m = fit_density(e, scope, cat);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_DOUBLE_EQ(m[0][0], 3.0 / 7.0);
    EXPECT_DOUBLE_EQ(m[0][1], 2.0 / 7.0);
    EXPECT_DOUBLE_EQ(m[0][2], 1.0 / 7.0);
    EXPECT_DOUBLE_EQ(m[0][3], 1.0 / 7.0);
}

TEST(FitDensity, EmptyIsUniformAndSingleOptionIsOne)
{
    auto cat = catalog_with({{"x", 4}, {"y", 1}});
    std::vector<std::string> scope = {"x", "y"};
    auto m = fit_density({}, scope, cat);
    for (double p : m[0])
        EXPECT_DOUBLE_EQ(p, 0.25);
    EXPECT_DOUBLE_EQ(m[1][0], 1.0);
    std::vector<FeedbackEntry> e = {entry({{"x", "C"}, {"y", "A"}}, 0)};
    EXPECT_DOUBLE_EQ(fit_density(e, scope, cat)[1][0], 1.0);
}

TEST(FitDensity, ProperAndPositive)
{
    auto cat = catalog_with({{"x", 5}, {"y", 3}});
    Rng rng(4);
    std::vector<std::string> scope = {"x", "y"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<FeedbackEntry> e;
        const int n = static_cast<int>(rng.below(20));
        for (int i = 0; i < n; ++i)
            e.push_back(entry({{"x", std::string(1, static_cast<char>('A' + rng.below(5)))},
                               {"y", std::string(1, static_cast<char>('A' + rng.below(3)))}},
                              0));
        for (const auto& mass : fit_density(e, scope, cat)) {
            double total = 0;
            for (double p : mass) {
                EXPECT_GT(p, 0.0);
                total += p;
            }
            EXPECT_NEAR(total, 1.0, 1e-9);
        }
    }
}

TEST(FitDensity, AppendedOptionsReceivePriorMass)
{
    auto cat = catalog_with({{"x", 2}});
    std::vector<FeedbackEntry> e = {entry({{"x", "A"}}, 0), entry({{"x", "B"}}, 0)};
    std::vector<std::string> scope = {"x"};
    cat.append_options("x", {{"C", {}, Provenance::evolved}});
    auto m = fit_density(e, scope, cat);
    ASSERT_EQ(m[0].size(), 3u);
    EXPECT_DOUBLE_EQ(m[0][2], 1.0 / 5.0);
}

TEST(TpeSample, RatioFavoursGoodOption)
{
    // l-group: A x3; g-group: A x1, B x3. Ratios 2.4 (A) and 0.3 (B).
    auto cat = catalog_with({{"x", 2}});
    std::vector<std::string> scope = {"x"};
    std::vector<FeedbackEntry> good(3, entry({{"x", "A"}}, 1.0));
    std::vector<FeedbackEntry> bad = {entry({{"x", "A"}}, 0.0), entry({{"x", "B"}}, 0.0), entry({{"x", "B"}}, 0.0),
                                      entry({{"x", "B"}}, 0.0)};
    DensityModel model;
    model.scope = scope;
    model.l = fit_density(good, scope, cat);
    model.g = fit_density(bad, scope, cat);
    EXPECT_DOUBLE_EQ(model.l[0][0] / model.g[0][0], 2.4);
    EXPECT_NEAR(model.l[0][1] / model.g[0][1], 0.3, 1e-15);

    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        auto cands = tpe_candidates(model, 24, rng);
        const bool any_a = std::any_of(cands.begin(), cands.end(), [](const Candidate& c) { return c[0] == 0; });
        EXPECT_EQ(cands[tpe_select(model, cands)][0] == 0, any_a);
    }
}

TEST(TpeSample, EmptyFeedbackIsUniform)
{
    auto cat = catalog_with({{"x", 2}, {"y", 2}});
    FeedbackSet f;
    f.scope = {"x", "y"};
    Rng rng(2024);
    auto out = tpe_sample(f, cat, 10000, rng, EvaluatorSpec{});
    int xa = 0, ya = 0;
    for (const auto& c : out) {
        xa += c.assignments.at("x") == "A";
        ya += c.assignments.at("y") == "A";
    }
    EXPECT_NEAR(xa / 10000.0, 0.5, 0.02);
    EXPECT_NEAR(ya / 10000.0, 0.5, 0.02);
}

TEST(TpeSample, SingleOptionSpace)
{
    auto cat = catalog_with({{"x", 1}});
    FeedbackSet f;
    f.scope = {"x"};
    f.entries.push_back(entry({{"x", "A"}}, 0.3));
    Rng rng(3);
    auto out = tpe_sample(f, cat, 5, rng, EvaluatorSpec{});
    ASSERT_EQ(out.size(), 5u);
    for (const auto& c : out)
        EXPECT_EQ(c.assignments.at("x"), "A");
    EXPECT_THROW(tpe_sample(f, cat, 0, rng, EvaluatorSpec{}), ArgumentError);
}

TEST(TpeSample, MatchesBruteForceArgmaxOnReplayedCandidates)
{
    auto cat = catalog_with({{"x", 3}, {"y", 4}, {"z", 2}});
    Rng data(77);
    for (int trial = 0; trial < 100; ++trial) {
        FeedbackSet f;
        f.scope = {"x", "y", "z"};
        const int n = 1 + static_cast<int>(data.below(15));
        for (int i = 0; i < n; ++i)
            f.entries.push_back(entry({{"x", std::string(1, static_cast<char>('A' + data.below(3)))},
                                       {"y", std::string(1, static_cast<char>('A' + data.below(4)))},
                                       {"z", std::string(1, static_cast<char>('A' + data.below(2)))}},
                                      data.uniform(), data.uniform() < 0.8, i));
        const std::uint64_t seed = data.next();
        Rng a(seed), b(seed);
        DensityModel model;
        auto picked = tpe_sample(f, cat, 1, a, EvaluatorSpec{}, {}, &model);
        auto cands = tpe_candidates(model, 24, b);
        std::size_t best = 0;
        double best_ratio = -1;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            double r = 1.0;
            for (std::size_t c = 0; c < cands[i].size(); ++c)
                r *= model.l[c][cands[i][c]] / model.g[c][cands[i][c]];
            if (r > best_ratio * (1 + 1e-12)) {
                best_ratio = r;
                best = i;
            }
        }
        EXPECT_EQ(picked[0], candidate_to_config(model, cands[best], cat));
    }
}

TEST(TpeSample, ExcludeAvoidsKnownKeysWhenPossible)
{
    auto cat = catalog_with({{"x", 3}});
    FeedbackSet f;
    f.scope = {"x"};
    f.entries.push_back(entry({{"x", "A"}}, 1.0));
    f.entries.push_back(entry({{"x", "B"}}, 0.0));
    std::set<std::string> exclude = {canonical_key(Configuration{{{"x", "A"}}, 0})};
    SampleOptions opts;
    opts.exclude = &exclude;
    Rng rng(8);
    for (int k = 0; k < 50; ++k) {
        auto c = tpe_sample(f, cat, 1, rng, EvaluatorSpec{}, opts);
        EXPECT_NE(c[0].assignments.at("x"), "A");
    }
}

TEST(TpeSample, BeatsUniformOnSeparableSurface)
{
    // Four cogs of five options with a unique best option each.
    auto cat = catalog_with({{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}});
    const double value[4][5] = {
        {0.1, 0.5, 0.2, 0.9, 0.3}, {0.7, 0.1, 0.2, 0.3, 0.4}, {0.2, 0.3, 1.0, 0.1, 0.0}, {0.0, 0.1, 0.2, 0.3, 0.8}};
    auto score = [&](const Configuration& c) {
        double s = 0;
        int i = 0;
        for (const auto& [cog, opt] : c.assignments)
            s += value[i++][opt[0] - 'A'];
        return s;
    };
    double tpe_total = 0, uniform_total = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed), urng(seed + 1000);
        FeedbackSet f;
        f.scope = cat.ids();
        double best = -1;
        for (int i = 0; i < 32; ++i) {
            auto c = tpe_sample(f, cat, 1, rng, EvaluatorSpec{})[0];
            const double s = score(c);
            best = std::max(best, s);
            f.entries.push_back(entry(c.assignments, s, true, i));
        }
        tpe_total += best;
        double ubest = -1;
        for (int i = 0; i < 32; ++i) {
            Configuration c;
            for (const auto& id : cat.ids())
                c.assignments[id] = std::string(1, static_cast<char>('A' + urng.below(5)));
            ubest = std::max(ubest, score(c));
        }
        uniform_total += ubest;
    }
    EXPECT_GE(tpe_total, uniform_total);
}
