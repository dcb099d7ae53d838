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

#ifndef ADASEEK_OBJECTIVES_HPP
#define ADASEEK_OBJECTIVES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cogspace.hpp"

namespace adaseek {

enum class Metric { quality, cost, latency };

inline constexpr Metric kAllMetrics[] = {Metric::quality, Metric::cost, Metric::latency};

inline std::string_view to_string(Metric m)
{
    switch (m) {
    case Metric::quality:
        return "quality";
    case Metric::cost:
        return "cost";
    case Metric::latency:
        return "latency";
    }
    return "?";
}

inline Metric parse_metric(std::string_view s)
{
    if (s == "quality")
        return Metric::quality;
    if (s == "cost")
        return Metric::cost;
    if (s == "latency")
        return Metric::latency;
    throw ArgumentError("unknown metric '" + std::string(s) + "'");
}

/// Quality is maximized; cost and latency are minimized.
inline constexpr bool maximized(Metric m) { return m == Metric::quality; }

struct MetricVector {
    double quality = 0.0;
    double cost = 0.0;
    double latency = 0.0;

    double get(Metric m) const
    {
        switch (m) {
        case Metric::quality:
            return quality;
        case Metric::cost:
            return cost;
        case Metric::latency:
            return latency;
        }
        return 0.0;
    }

    bool valid() const
    {
        return std::isfinite(quality) && std::isfinite(cost) && std::isfinite(latency) && cost >= 0.0 &&
               latency >= 0.0;
    }

    bool operator==(const MetricVector&) const = default;
};

/// `quality >= bound`, `cost <= bound`, `latency <= bound`.
struct Threshold {
    Metric metric = Metric::quality;
    double bound = 0.0;

    bool satisfied_by(const MetricVector& m) const
    {
        const double v = m.get(metric);
        return maximized(metric) ? v >= bound : v <= bound;
    }
};

enum class Scalarizer {
    automatic,        // quality alone, or quality over the normalized product of the active cost terms
    quality,          // quality projection
    quality_per_cost, // quality x 1/cost
};

inline constexpr double kCostFloor = 1e-9;
inline constexpr double kInfeasibleScore = -std::numeric_limits<double>::infinity();

struct EvaluatorSpec {
    std::vector<Metric> objectives{Metric::quality};
    std::vector<Threshold> thresholds;
    Scalarizer scalarizer = Scalarizer::automatic;
    /// Normalizers for the automatic scalarizer when cost and latency are both
    /// objectives (set from observed medians by the driver).
    double cost_scale = 1.0;
    double latency_scale = 1.0;
    /// Picks per turn for each objective during select_best; empty = all 1.
    std::vector<int> selection_weights;

    bool has(Metric m) const { return std::find(objectives.begin(), objectives.end(), m) != objectives.end(); }
    bool single_objective() const { return objectives.size() == 1; }

    void validate() const
    {
        if (objectives.empty())
            throw ArgumentError("evaluator spec needs at least one objective");
        for (std::size_t i = 0; i < objectives.size(); ++i)
            for (std::size_t j = i + 1; j < objectives.size(); ++j)
                if (objectives[i] == objectives[j])
                    throw ArgumentError("duplicate objective '" + std::string(to_string(objectives[i])) + "'");
        if (!selection_weights.empty() && selection_weights.size() != objectives.size())
            throw ArgumentError("selection_weights must have one entry per objective");
    }
};

inline bool feasible(const MetricVector& m, const EvaluatorSpec& spec)
{
    return std::all_of(spec.thresholds.begin(), spec.thresholds.end(),
                       [&](const Threshold& t) { return t.satisfied_by(m); });
}

/// Score ignoring feasibility. Feedback sets carry this value so infeasible
/// entries keep an ordering among themselves.
inline double raw_score(const MetricVector& m, const EvaluatorSpec& spec)
{
    switch (spec.scalarizer) {
    case Scalarizer::quality:
        return m.quality;
    case Scalarizer::quality_per_cost:
        return m.quality / std::max(m.cost, kCostFloor);
    case Scalarizer::automatic:
        break;
    }
    if (spec.objectives.size() == 1 && spec.objectives.front() == Metric::quality)
        return m.quality;
    const bool use_cost = spec.has(Metric::cost);
    const bool use_latency = spec.has(Metric::latency);
    double denom = 1.0;
    if (use_cost)
        denom *= std::max(m.cost, kCostFloor) / (use_latency ? spec.cost_scale : 1.0);
    if (use_latency)
        denom *= std::max(m.latency, kCostFloor) / (use_cost ? spec.latency_scale : 1.0);
    const double numer = spec.has(Metric::quality) ? m.quality : 1.0;
    return numer / denom;
}

/// Single-number score; infeasible metric vectors score -infinity.
inline double scalar_score(const MetricVector& m, const EvaluatorSpec& spec)
{
    return feasible(m, spec) ? raw_score(m, spec) : kInfeasibleScore;
}

/// Pareto dominance on the evaluator's objectives.
inline bool dominates(const MetricVector& a, const MetricVector& b, const EvaluatorSpec& spec)
{
    bool strictly = false;
    for (Metric o : spec.objectives) {
        const double x = a.get(o);
        const double y = b.get(o);
        const bool better = maximized(o) ? x > y : x < y;
        const bool worse = maximized(o) ? x < y : x > y;
        if (worse)
            return false;
        strictly = strictly || better;
    }
    return strictly;
}

struct Observation {
    Configuration config;
    MetricVector metrics;
    bool feasible = true;
    std::int64_t eval_index = -1;
    std::int64_t chunk_id = 0;
    int layer_round = 0;
    bool cached = false; // served from an earlier identical evaluation
    bool failed = false; // evaluator raised; metrics are sentinels

    std::string key() const { return canonical_key(config); }
};

inline double effective_score(const Observation& o, const EvaluatorSpec& spec)
{
    return o.feasible ? raw_score(o.metrics, spec) : kInfeasibleScore;
}

/// Minimal view used by rank_for_search so observations and feedback entries
/// rank identically.
struct RankItem {
    MetricVector metrics;
    double score = 0.0; // raw score
    bool feasible = true;
    std::int64_t order = 0; // eval_index or equivalent tie-breaker

    double effective() const { return feasible ? score : kInfeasibleScore; }
};

namespace detail {

inline bool better_along(Metric m, double x, double y) { return maximized(m) ? x > y : x < y; }

/// Nondomination rank per item (0 = frontier) over feasible items; infeasible
/// items get the largest rank.
inline std::vector<std::size_t> nondomination_ranks(std::span<const RankItem> items, const EvaluatorSpec& spec)
{
    const std::size_t n = items.size();
    std::vector<std::size_t> rank(n, std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> dominated_by(n, 0);
    std::vector<std::vector<std::size_t>> dominates_list(n);
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (!items[i].feasible)
            continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !items[j].feasible)
                continue;
            if (dominates(items[i].metrics, items[j].metrics, spec))
                dominates_list[i].push_back(j);
            else if (dominates(items[j].metrics, items[i].metrics, spec))
                ++dominated_by[i];
        }
        if (dominated_by[i] == 0)
            current.push_back(i);
    }
    std::size_t level = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto i : current) {
            rank[i] = level;
            for (auto j : dominates_list[i])
                if (--dominated_by[j] == 0)
                    next.push_back(j);
        }
        current = std::move(next);
        ++level;
    }
    return rank;
}

} // namespace detail

/// Total order used for survivor selection and surrogate splitting. Single
/// objective: descending score. Several objectives: ascending nondomination
/// rank, then descending score. Remaining ties: ascending order field.
inline std::vector<std::size_t> rank_for_search(std::span<const RankItem> items, const EvaluatorSpec& spec)
{
    std::vector<std::size_t> idx(items.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::size_t> rank(items.size(), 0);
    if (!spec.single_objective())
        rank = detail::nondomination_ranks(items, spec);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b])
            return rank[a] < rank[b];
        const double sa = items[a].effective();
        const double sb = items[b].effective();
        if (sa != sb)
            return sa > sb;
        if (items[a].order != items[b].order)
            return items[a].order < items[b].order;
        return a < b;
    });
    return idx;
}

inline RankItem rank_item(const Observation& o, const EvaluatorSpec& spec)
{
    return {o.metrics, raw_score(o.metrics, spec), o.feasible, o.eval_index};
}

inline std::vector<std::size_t> rank_for_search(std::span<const Observation> feedback, const EvaluatorSpec& spec)
{
    std::vector<RankItem> items;
    items.reserve(feedback.size());
    for (const auto& o : feedback)
        items.push_back(rank_item(o, spec));
    return rank_for_search(std::span<const RankItem>(items), spec);
}

/// Append-only global result set with per-metric sorted queues.
class ResultArchive {
public:
    const std::vector<Observation>& observations() const { return observations_; }
    std::size_t size() const { return observations_.size(); }
    bool empty() const { return observations_.empty(); }
    const Observation& operator[](std::size_t i) const { return observations_[i]; }

    /// Appends and assigns eval_index = previous size.
    const Observation& append(Observation obs)
    {
        obs.eval_index = static_cast<std::int64_t>(observations_.size());
        const std::size_t pos = observations_.size();
        key_index_[obs.key()].push_back(obs.eval_index);
        observations_.push_back(std::move(obs));
        for (Metric m : kAllMetrics) {
            auto& q = queues_[static_cast<std::size_t>(m)];
            // New entry has the largest eval_index, so it goes after equal values.
            auto it = std::upper_bound(q.begin(), q.end(), pos, [&](std::size_t a, std::size_t b) {
                return detail::better_along(m, observations_[a].metrics.get(m), observations_[b].metrics.get(m));
            });
            q.insert(it, pos);
        }
        return observations_.back();
    }

    /// Observation positions ordered best-first along `m`, ties by eval_index.
    const std::vector<std::size_t>& queue(Metric m) const { return queues_[static_cast<std::size_t>(m)]; }

    /// eval_indexes recorded for `key`, ascending.
    const std::vector<std::int64_t>* lookup(const std::string& key) const
    {
        auto it = key_index_.find(key);
        return it == key_index_.end() ? nullptr : &it->second;
    }

private:
    std::vector<Observation> observations_;
    std::vector<std::size_t> queues_[3];
    std::unordered_map<std::string, std::vector<std::int64_t>> key_index_;
};

/// Feasible, nondominated observations, deduplicated by key (lowest
/// eval_index wins), sorted best-first on the first objective.
inline std::vector<Observation> pareto_frontier(std::span<const Observation> observations, const EvaluatorSpec& spec)
{
    std::vector<const Observation*> candidates;
    std::unordered_set<std::string> seen;
    std::vector<const Observation*> by_index;
    for (const auto& o : observations)
        by_index.push_back(&o);
    std::sort(by_index.begin(), by_index.end(),
              [](const Observation* a, const Observation* b) { return a->eval_index < b->eval_index; });
    for (const auto* o : by_index) {
        if (!o->feasible)
            continue;
        if (!seen.insert(o->key()).second)
            continue;
        candidates.push_back(o);
    }
    std::vector<const Observation*> front;
    for (const auto* c : candidates) {
        bool dominated = false;
        for (const auto* f : front) {
            if (dominates(f->metrics, c->metrics, spec)) {
                dominated = true;
                break;
            }
        }
        if (dominated)
            continue;
        std::erase_if(front, [&](const Observation* f) { return dominates(c->metrics, f->metrics, spec); });
        front.push_back(c);
    }
    const Metric first = spec.objectives.front();
    std::sort(front.begin(), front.end(), [&](const Observation* a, const Observation* b) {
        const double x = a->metrics.get(first);
        const double y = b->metrics.get(first);
        if (x != y)
            return detail::better_along(first, x, y);
        return a->eval_index < b->eval_index;
    });
    std::vector<Observation> out;
    out.reserve(front.size());
    for (const auto* f : front)
        out.push_back(*f);
    return out;
}

inline std::vector<Observation> pareto_frontier(const ResultArchive& archive, const EvaluatorSpec& spec)
{
    return pareto_frontier(std::span<const Observation>(archive.observations()), spec);
}

/// Up to k frontier members. When the frontier is larger than k, members are
/// taken round-robin from the per-objective queues, best of each first.
inline std::vector<Observation> select_best(const ResultArchive& archive, const EvaluatorSpec& spec, std::size_t k)
{
    if (k == 0)
        throw ArgumentError("select_best: k must be >= 1");
    auto front = pareto_frontier(archive, spec);
    if (front.size() <= k)
        return front;

    std::unordered_set<std::int64_t> on_front;
    for (const auto& f : front)
        on_front.insert(f.eval_index);
    std::vector<std::size_t> cursor(spec.objectives.size(), 0);
    std::unordered_set<std::string> taken;
    std::vector<Observation> out;
    bool progressed = true;
    while (out.size() < k && progressed) {
        progressed = false;
        for (std::size_t oi = 0; oi < spec.objectives.size() && out.size() < k; ++oi) {
            const int picks = spec.selection_weights.empty() ? 1 : spec.selection_weights[oi];
            const auto& q = archive.queue(spec.objectives[oi]);
            for (int p = 0; p < picks && out.size() < k; ++p) {
                while (cursor[oi] < q.size()) {
                    const Observation& o = archive[q[cursor[oi]++]];
                    if (on_front.count(o.eval_index) != 0 && taken.insert(o.key()).second) {
                        out.push_back(o);
                        progressed = true;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

} // namespace adaseek

#endif
