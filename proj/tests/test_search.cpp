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

#include "adaseek/search.hpp"

using namespace adaseek;

namespace {

CogCatalog make_catalog(std::vector<std::pair<Category, int>> cogs)
{
    std::vector<Cog> out;
    int i = 0;
    for (auto [cat, m] : cogs) {
        Cog c;
        c.id = "c" + std::to_string(i++);
        c.category = cat;
        for (int j = 0; j < m; ++j)
            c.options.push_back({"o" + std::to_string(j), {}, Provenance::static_option});
        out.push_back(c);
    }
    return CogCatalog(out);
}

// Deterministic rugged surface: quality from a hash of the key.
MetricVector hashed(const Configuration& c)
{
    const auto h = hash_string(canonical_key(c));
    return {static_cast<double>(h % 1000) / 1000.0, 1.0 + static_cast<double>((h >> 10) % 100) / 10.0, 1.0};
}

struct Harness {
    CogCatalog catalog;
    FunctionEvaluator evaluator{hashed};
    SearchContext ctx;
    std::int64_t counter = 0;

    Harness(CogCatalog cat, std::vector<std::vector<std::string>> layers, std::vector<std::int64_t> budgets,
            SearchKnobs knobs = {})
        : catalog(std::move(cat))
    {
        ctx.catalog = &catalog;
        ctx.evaluator = &evaluator;
        ctx.layers = std::move(layers);
        ctx.budgets = std::move(budgets);
        ctx.knobs = knobs;
        ctx.round_L = static_cast<int>(ctx.layers.size());
        ctx.chunk_counter = &counter;
    }

    std::pair<ResultArchive, SearchRecord> run(std::uint64_t seed)
    {
        ResultArchive archive;
        ArchiveView view(archive);
        SearchRecord rec;
        const int top = static_cast<int>(ctx.layers.size());
        LayerSearch(ctx).run(view, rec, Configuration{}, top, ctx.budgets.back(), seed, true, 0, "r");
        return {std::move(archive), std::move(rec)};
    }
};

FeedbackEntry fe(std::map<std::string, std::string> a, double s, bool ok = true, std::int64_t order = 0)
{
    FeedbackEntry e;
    e.config.assignments = std::move(a);
    e.score = s;
    e.metrics.quality = s;
    e.feasible = ok;
    e.order = order;
    return e;
}

std::string dump(const ResultArchive& a)
{
    std::string out;
    for (const auto& o : a.observations())
        out += std::to_string(o.eval_index) + " " + o.key() + " " + std::to_string(o.chunk_id) + "\n";
    return out;
}

} // namespace

TEST(RungSchedule, Examples)
{
    auto a = make_rung_schedule(4, 2);
    EXPECT_EQ(a.r0, 2);
    EXPECT_EQ(a.rungs, 2);
    EXPECT_EQ(a.budgets, (std::vector<std::int64_t>{2, 4}));
    auto b = make_rung_schedule(1, 2);
    EXPECT_EQ(b.r0, 1);
    EXPECT_EQ(b.budgets, (std::vector<std::int64_t>{1}));
    auto c = make_rung_schedule(9, 3);
    EXPECT_EQ(c.r0, 3);
    EXPECT_EQ(c.budgets, (std::vector<std::int64_t>{3, 9, 27}));
}

TEST(RungSchedule, RejectsBadArguments)
{
    EXPECT_THROW(make_rung_schedule(0, 2), ArgumentError);
    EXPECT_THROW(make_rung_schedule(4, 1), ArgumentError);
}

TEST(RungSchedule, StrictlyIncreasingAndBounded)
{
    for (int eta = 2; eta <= 4; ++eta)
        for (std::int64_t b = 1; b <= 200; ++b) {
            auto s = make_rung_schedule(b, eta);
            for (std::size_t i = 1; i < s.budgets.size(); ++i)
                EXPECT_GT(s.budgets[i], s.budgets[i - 1]);
            // Halving from any W keeps sum r_s |theta_s| <= S r0 W.
            for (std::int64_t W = 1; W <= 16; ++W) {
                std::int64_t theta = W, sum = 0;
                for (int r = 0; r < s.rungs && theta > 0; ++r) {
                    sum += s.budgets[static_cast<std::size_t>(r)] * theta;
                    theta /= eta;
                }
                EXPECT_LE(sum, s.rungs * s.r0 * W);
            }
        }
}

TEST(Halve, KeepsFloorOfQuotient)
{
    EvaluatorSpec spec;
    auto items = [](int n) {
        std::vector<RankItem> v;
        for (int i = 0; i < n; ++i)
            v.push_back({{0.1 * i, 1, 1}, 0.1 * i, true, i});
        return v;
    };
    auto eight = items(8);
    EXPECT_EQ(halve(eight, 2, spec), (std::vector<std::size_t>{7, 6, 5, 4}));
    auto three = items(3);
    EXPECT_EQ(halve(three, 2, spec), (std::vector<std::size_t>{2}));
    auto one = items(1);
    EXPECT_TRUE(halve(one, 2, spec).empty());
}

TEST(EarlyStop, SmallGainStops)
{
    EarlyStopState st{3, 0.01, {}};
    EXPECT_FALSE(early_stop_check(st, 0.50));
    EXPECT_FALSE(early_stop_check(st, 0.505));
    EXPECT_FALSE(early_stop_check(st, 0.506));
    EXPECT_TRUE(early_stop_check(st, 0.506));
}

TEST(EarlyStop, LargeGainContinues)
{
    EarlyStopState st{3, 0.01, {}};
    for (double v : {0.1, 0.5, 0.9})
        EXPECT_FALSE(early_stop_check(st, v));
    EXPECT_FALSE(early_stop_check(st, 1.3));
    EXPECT_LE(st.history.size(), 4u);
}

TEST(EarlyStop, WarmUpNeverStops)
{
    EarlyStopState st{5, 1.0, {}};
    for (int i = 0; i < 5; ++i)
        EXPECT_FALSE(early_stop_check(st, 0.0));
    EXPECT_TRUE(early_stop_check(st, 0.0));
}

TEST(EarlyStop, SubSearchStalledAgainstPriorBest)
{
    SearchKnobs k;
    k.es_window = 3;
    k.es_epsilon = 0.01;
    EvaluatorSpec spec; // quality only
    auto obs = [](std::initializer_list<double> qs) {
        std::vector<Observation> v;
        for (double q : qs) {
            Observation o;
            o.metrics = {q, 1, 1};
            v.push_back(o);
        }
        return v;
    };
    EXPECT_TRUE(stalled_against(obs({0.5, 0.5, 0.5}), 0.5, k, spec));
    EXPECT_TRUE(stalled_against(obs({0.3, 0.505, 0.4}), 0.5, k, spec)); // gain 0.005 < 0.01
    EXPECT_FALSE(stalled_against(obs({0.3, 0.52, 0.4}), 0.5, k, spec));
    EXPECT_FALSE(stalled_against(obs({0.1, 0.1}), 0.5, k, spec)); // shorter than the window
    EXPECT_FALSE(stalled_against(obs({0.1, 0.1, 0.1}), kInfeasibleScore, k, spec));
}

TEST(ProjectFeedback, MaxProjection)
{
    FeedbackSet child;
    child.scope = {"t", "l"};
    child.entries = {fe({{"t", "a"}, {"l", "x"}}, 0.4, true, 0), fe({{"t", "a"}, {"l", "y"}}, 0.7, true, 1),
                     fe({{"t", "b"}, {"l", "z"}}, 0.5, true, 2)};
    std::vector<std::string> scope = {"t"};
    auto p = project_feedback(child, scope, EvaluatorSpec{});
    ASSERT_EQ(p.entries.size(), 2u);
    EXPECT_EQ(p.entries[0].config.assignments.at("t"), "a");
    EXPECT_DOUBLE_EQ(p.entries[0].score, 0.7);
    EXPECT_EQ(p.entries[0].config.size(), 1u);
    EXPECT_DOUBLE_EQ(p.entries[1].score, 0.5);
}

TEST(ProjectFeedback, SingleAndInfeasible)
{
    std::vector<std::string> scope = {"t"};
    FeedbackSet one;
    one.entries = {fe({{"t", "a"}, {"l", "x"}}, 0.3)};
    auto p = project_feedback(one, scope, EvaluatorSpec{});
    ASSERT_EQ(p.entries.size(), 1u);
    EXPECT_DOUBLE_EQ(p.entries[0].score, 0.3);

    FeedbackSet bad;
    bad.entries = {fe({{"t", "a"}, {"l", "x"}}, 0.2, false, 0), fe({{"t", "a"}, {"l", "y"}}, 0.6, false, 1)};
    auto q = project_feedback(bad, scope, EvaluatorSpec{});
    ASSERT_EQ(q.entries.size(), 1u);
    EXPECT_FALSE(q.entries[0].feasible);
}

TEST(LayerSearch, InnermostRunsExactBudget)
{
    SearchKnobs k;
    k.early_stop = false;
    Harness h(make_catalog({{Category::weight, 5}}), {{"c0"}}, {3}, k);
    auto [archive, rec] = h.run(1);
    EXPECT_EQ(archive.size(), 3u);
    EXPECT_EQ(rec.proposals[0], 3);
    std::set<std::string> keys;
    for (const auto& o : archive.observations())
        keys.insert(o.key());
    EXPECT_EQ(keys.size(), 3u); // dedup avoids repeats while unseen options remain
}

TEST(LayerSearch, ZeroBudgetDoesNothing)
{
    Harness h(make_catalog({{Category::weight, 5}}), {{"c0"}}, {0});
    auto [archive, rec] = h.run(1);
    EXPECT_TRUE(archive.empty());
}

TEST(LayerSearch, TwoLayerRungTrace)
{
    SearchKnobs k;
    k.early_stop = false;
    k.chunk_size = 4;
    Harness h(make_catalog({{Category::step, 4}, {Category::weight, 4}, {Category::architecture, 4}}), {{"c0", "c1"}, {"c2"}},
              {4, 4}, k);
    auto [archive, rec] = h.run(5);
    ASSERT_EQ(rec.chunks.size(), 1u);
    const auto& c = rec.chunks[0];
    EXPECT_EQ(c.r0, 2);
    EXPECT_EQ(c.S, 2);
    EXPECT_EQ(c.rung_budget, (std::vector<std::int64_t>{2, 4}));
    EXPECT_EQ(c.rung_theta, (std::vector<std::int64_t>{4, 2}));
    EXPECT_EQ(c.rung_sum(), 16);
    EXPECT_LE(c.rung_sum(), c.bound());
    EXPECT_EQ(archive.size(), 16u);
    EXPECT_EQ(rec.proposals[1], 4);
    // Survivors shrink and nest.
    ASSERT_EQ(c.survivors.size(), 2u);
    EXPECT_EQ(c.survivors[0].size(), 2u);
    EXPECT_EQ(c.survivors[1].size(), 1u);
    EXPECT_NE(std::find(c.survivors[0].begin(), c.survivors[0].end(), c.survivors[1][0]), c.survivors[0].end());
}

TEST(LayerSearch, ThreeLayerBudgetProduct)
{
    Rng pick(99);
    for (int trial = 0; trial < 25; ++trial) {
        const std::int64_t b1 = 1 + static_cast<std::int64_t>(pick.below(6));
        const std::int64_t b2 = 1 + static_cast<std::int64_t>(pick.below(6));
        const std::int64_t b3 = 1 + static_cast<std::int64_t>(pick.below(10));
        SearchKnobs k;
        k.early_stop = trial % 2 == 0;
        k.chunk_size = 2 + static_cast<int>(pick.below(7));
        Harness h(make_catalog({{Category::weight, 3}, {Category::step, 3}, {Category::architecture, 3}}),
                  {{"c0"}, {"c1"}, {"c2"}}, {b1, b2, b3}, k);
        auto [archive, rec] = h.run(static_cast<std::uint64_t>(trial));
        EXPECT_LE(static_cast<std::int64_t>(archive.size()), b1 * b2 * b3);
        EXPECT_LE(rec.proposals[0], b1 * b2 * b3);
        EXPECT_LE(rec.proposals[1], b2 * b3);
        EXPECT_LE(rec.proposals[2], b3);
        for (const auto& c : rec.chunks)
            EXPECT_LE(c.rung_sum(), c.bound());
    }
}

TEST(LayerSearch, EmptyMiddleLayerPassesThrough)
{
    SearchKnobs k;
    k.early_stop = false;
    Harness h(make_catalog({{Category::weight, 4}, {Category::architecture, 3}}), {{"c0"}, {}, {"c1"}}, {2, 1, 3}, k);
    auto [archive, rec] = h.run(4);
    EXPECT_LE(static_cast<std::int64_t>(archive.size()), 2 * 1 * 3);
    EXPECT_GT(archive.size(), 0u);
    for (const auto& o : archive.observations())
        EXPECT_EQ(o.config.size(), 2u);
}

TEST(LayerSearch, DeterministicAndParallelInvariant)
{
    SearchKnobs serial;
    SearchKnobs parallel;
    parallel.parallel = 4;
    auto cat = make_catalog({{Category::weight, 4}, {Category::step, 4}, {Category::architecture, 4}});
    Harness a(cat, {{"c0"}, {"c1"}, {"c2"}}, {4, 4, 8}, serial);
    Harness b(cat, {{"c0"}, {"c1"}, {"c2"}}, {4, 4, 8}, serial);
    Harness c(cat, {{"c0"}, {"c1"}, {"c2"}}, {4, 4, 8}, parallel);
    const auto ra = dump(a.run(12).first);
    EXPECT_EQ(ra, dump(b.run(12).first));
    EXPECT_EQ(ra, dump(c.run(12).first));
    EXPECT_NE(ra, dump(a.run(13).first));
}

TEST(LayerSearch, DisablingEarlyStopNeverLowersBest)
{
    auto cat = make_catalog({{Category::weight, 6}, {Category::step, 6}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SearchKnobs on, off;
        off.early_stop = false;
        Harness a(cat, {{"c0", "c1"}}, {30}, on);
        Harness b(cat, {{"c0", "c1"}}, {30}, off);
        auto best = [](const ResultArchive& ar) {
            double m = -1;
            for (const auto& o : ar.observations())
                m = std::max(m, o.metrics.quality);
            return m;
        };
        auto ra = a.run(seed).first;
        auto rb = b.run(seed).first;
        EXPECT_LE(ra.size(), rb.size());
        EXPECT_GE(best(rb), best(ra));
    }
}

TEST(LayerSearch, ChunkHookFiresPerTopLevelChunk)
{
    SearchKnobs k;
    k.early_stop = false;
    k.chunk_size = 4;
    Harness h(make_catalog({{Category::weight, 8}, {Category::step, 8}}), {{"c0", "c1"}}, {10}, k);
    int calls = 0;
    h.ctx.on_chunk_end = [&] { ++calls; };
    auto [archive, rec] = h.run(2);
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(h.counter, 3);
    EXPECT_EQ(archive[9].chunk_id, 2);
}

TEST(LayerSearch, FailedEvaluationsAreRecordedInfeasible)
{
    CogCatalog cat = make_catalog({{Category::weight, 3}});
    FunctionEvaluator bad([](const Configuration& c) -> MetricVector {
        if (c.assignments.at("c0") == "o1")
            throw std::runtime_error("boom");
        return {0.5, 1, 1};
    });
    SearchContext ctx;
    ctx.catalog = &cat;
    ctx.evaluator = &bad;
    ctx.layers = {{"c0"}};
    ctx.budgets = {3};
    ctx.knobs.early_stop = false;
    ResultArchive archive;
    ArchiveView view(archive);
    SearchRecord rec;
    LayerSearch(ctx).run(view, rec, Configuration{}, 1, 3, 7, true, 0, "r");
    ASSERT_EQ(archive.size(), 3u);
    int failed = 0;
    for (const auto& o : archive.observations()) {
        failed += o.failed ? 1 : 0;
        if (o.failed) {
            EXPECT_FALSE(o.feasible);
        }
    }
    EXPECT_EQ(failed, 1);
}
