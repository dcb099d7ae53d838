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

#ifndef ADASEEK_BASELINES_HPP
#define ADASEEK_BASELINES_HPP

// Reference searches sharing the archive format: uniform random sampling,
// full grid enumeration and a single-layer TPE loop. Every observation is
// tagged layer_round 0.

#include <string>

#include "cogspace.hpp"
#include "evaluator.hpp"
#include "objectives.hpp"
#include "random.hpp"
#include "search.hpp"

namespace adaseek {

enum class BaselineKind { random, grid, flat_tpe };

inline std::string_view to_string(BaselineKind k)
{
    switch (k) {
    case BaselineKind::random:
        return "random";
    case BaselineKind::grid:
        return "grid";
    case BaselineKind::flat_tpe:
        return "flat_tpe";
    }
    return "random";
}

inline BaselineKind parse_baseline(std::string_view s)
{
    if (s == "random")
        return BaselineKind::random;
    if (s == "grid")
        return BaselineKind::grid;
    if (s == "flat_tpe")
        return BaselineKind::flat_tpe;
    throw ArgumentError("unknown baseline '" + std::string(s) + "'");
}

inline constexpr std::uint64_t kMaxGridSpace = std::uint64_t{1} << 20;

namespace detail {

/// Records one evaluation; a repeated key reuses the first result.
inline void record_baseline(ResultArchive& archive, const Evaluator& evaluator, const EvaluatorSpec& spec,
                            Configuration config, std::int64_t chunk_id, std::uint64_t nonce)
{
    Observation o;
    o.config = std::move(config);
    o.chunk_id = chunk_id;
    o.layer_round = 0;
    if (const auto* hits = archive.lookup(o.key())) {
        const Observation& first = archive[static_cast<std::size_t>(hits->front())];
        o.metrics = first.metrics;
        o.failed = first.failed;
        o.cached = true;
    } else {
        try {
            o.metrics = evaluator.evaluate(o.config, nonce);
            if (!o.metrics.valid())
                throw std::runtime_error("invalid metrics");
        } catch (const std::exception&) {
            o.metrics = MetricVector{};
            o.failed = true;
        }
    }
    o.feasible = !o.failed && feasible(o.metrics, spec);
    archive.append(std::move(o));
}

} // namespace detail

inline ResultArchive random_search(const CogCatalog& catalog, const Evaluator& evaluator, const EvaluatorSpec& spec,
                                   std::int64_t budget, std::uint64_t seed, int chunk_size = 8)
{
    ResultArchive archive;
    Rng rng(derive_seed(seed, {0x72616e64ULL}));
    for (std::int64_t i = 0; i < budget; ++i) {
        Configuration c;
        c.catalog_version = catalog.version();
        for (const auto& cog : catalog.cogs())
            c.assignments[cog.id] = cog.options[rng.below(cog.options.size())].id;
        detail::record_baseline(archive, evaluator, spec, std::move(c), i / std::max(1, chunk_size),
                                derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    }
    return archive;
}

/// Every configuration in index order; the budget is ignored.
inline ResultArchive grid_search(const CogCatalog& catalog, const Evaluator& evaluator, const EvaluatorSpec& spec,
                                 int chunk_size = 8)
{
    const std::uint64_t size = space_size(catalog);
    if (size > kMaxGridSpace)
        throw SizeError("grid search over " + std::to_string(size) + " configurations exceeds 2^20",
                        static_cast<double>(size));
    ResultArchive archive;
    for (std::uint64_t i = 0; i < size; ++i)
        detail::record_baseline(archive, evaluator, spec, catalog.stamp(configuration_at(catalog, i)),
                                static_cast<std::int64_t>(i) / std::max(1, chunk_size), i);
    return archive;
}

/// All cogs in one layer, `budget` sequential TPE proposals, no early stop.
inline ResultArchive flat_tpe_search(const CogCatalog& catalog, const Evaluator& evaluator, const EvaluatorSpec& spec,
                                     std::int64_t budget, std::uint64_t seed, SearchKnobs knobs = {})
{
    knobs.early_stop = false;
    knobs.parallel = 1;
    ResultArchive archive;
    std::int64_t chunk_counter = 0;
    SearchContext ctx;
    ctx.catalog = &catalog;
    ctx.evaluator = &evaluator;
    ctx.spec = spec;
    ctx.knobs = knobs;
    ctx.layers = {catalog.ids()};
    ctx.budgets = {budget};
    ctx.round_L = 0;
    ctx.seed = seed;
    ctx.chunk_counter = &chunk_counter;
    LayerSearch search(ctx);
    ArchiveView view(archive);
    SearchRecord rec;
    search.run(view, rec, Configuration{{}, catalog.version()}, 1, budget, derive_seed(seed, {0x666c6174ULL}), true,
               0, "flat");
    return archive;
}

inline ResultArchive run_baseline(BaselineKind kind, const CogCatalog& catalog, const Evaluator& evaluator,
                                  const EvaluatorSpec& spec, std::int64_t budget, std::uint64_t seed,
                                  const SearchKnobs& knobs = {})
{
    switch (kind) {
    case BaselineKind::random:
        return random_search(catalog, evaluator, spec, budget, seed, knobs.chunk_size);
    case BaselineKind::grid:
        return grid_search(catalog, evaluator, spec, knobs.chunk_size);
    case BaselineKind::flat_tpe:
        return flat_tpe_search(catalog, evaluator, spec, budget, seed, knobs);
    }
    return {};
}

} // namespace adaseek

#endif
