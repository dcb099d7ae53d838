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

#ifndef ADASEEK_SURROGATE_HPP
#define ADASEEK_SURROGATE_HPP

// Tree-structured Parzen estimator over discrete cogs.
//
// Observations are split into a good group (top gamma quantile of feasible
// entries) and a bad group (the rest plus every threshold violator). Each
// group gets an independent smoothed categorical density per cog, and new
// points are the candidate maximizing l(x)/g(x), which maximizes expected
// improvement for this model family.

#include <cmath>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cogspace.hpp"
#include "objectives.hpp"
#include "random.hpp"

namespace adaseek {

struct FeedbackEntry {
    Configuration config; // assignments over the feedback scope
    double score = 0.0;   // raw score; feasibility is carried separately
    bool feasible = true;
    MetricVector metrics;
    std::int64_t order = 0; // tie-breaker, ascending = earlier

    RankItem rank_item() const { return {metrics, score, feasible, order}; }
};

struct FeedbackSet {
    std::vector<std::string> scope;
    std::vector<FeedbackEntry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

inline std::vector<std::size_t> rank_for_search(const FeedbackSet& feedback, const EvaluatorSpec& spec)
{
    std::vector<RankItem> items;
    items.reserve(feedback.entries.size());
    for (const auto& e : feedback.entries)
        items.push_back(e.rank_item());
    return rank_for_search(std::span<const RankItem>(items), spec);
}

struct TpeOptions {
    double gamma = 0.25;
    double smoothing = 1.0; // Laplace pseudo-count per option
    int n_candidates = 24;
};

struct Split {
    std::vector<std::size_t> l; // entry indices, best first
    std::vector<std::size_t> g;
    double gamma = 0.25;
    double split_score = 0.0;
    bool degenerate = false; // no feasible entry; l holds the best raw score
};

inline std::size_t good_group_size(std::size_t n_feasible, double gamma)
{
    const double raw = std::ceil(gamma * static_cast<double>(n_feasible) - 1e-12);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(0.0, raw)));
}

/// Splits feedback into the good (l) and bad (g) groups. Ordering is
/// rank_for_search under `spec`; with one objective that is plain descending
/// score.
inline Split split_observations(const FeedbackSet& feedback, const EvaluatorSpec& spec, double gamma = 0.25)
{
    if (feedback.entries.empty())
        throw ArgumentError("split_observations: feedback is empty");
    Split out;
    out.gamma = gamma;
    const auto order = rank_for_search(feedback, spec);
    std::size_t n_feasible = 0;
    for (const auto& e : feedback.entries)
        n_feasible += e.feasible ? 1 : 0;

    if (n_feasible == 0) {
        out.degenerate = true;
        std::size_t best = 0;
        for (std::size_t i = 1; i < feedback.entries.size(); ++i) {
            const auto& a = feedback.entries[i];
            const auto& b = feedback.entries[best];
            if (a.score > b.score || (a.score == b.score && a.order < b.order))
                best = i;
        }
        out.l.push_back(best);
        for (auto i : order)
            if (i != best)
                out.g.push_back(i);
        out.split_score = feedback.entries[best].score;
        return out;
    }

    const std::size_t n_good = good_group_size(n_feasible, gamma);
    for (auto i : order) {
        const auto& e = feedback.entries[i];
        if (e.feasible && out.l.size() < n_good)
            out.l.push_back(i);
        else
            out.g.push_back(i);
    }
    out.split_score = std::numeric_limits<double>::infinity();
    for (auto i : out.l)
        out.split_score = std::min(out.split_score, feedback.entries[i].score);
    return out;
}

/// One smoothed categorical mass function per scope cog, indexed by the
/// catalog's option order: (count + s) / (n + m*s).
inline std::vector<std::vector<double>> fit_density(std::span<const FeedbackEntry> entries,
                                                    std::span<const std::string> scope,
                                                    const CogCatalog& catalog, double smoothing = 1.0)
{
    std::vector<std::vector<double>> masses;
    masses.reserve(scope.size());
    for (const auto& cog_id : scope) {
        const Cog& cog = catalog.at(cog_id);
        const std::size_t m = cog.options.size();
        std::vector<double> counts(m, 0.0);
        std::size_t n = 0;
        for (const auto& e : entries) {
            const auto* opt = e.config.find(cog_id);
            if (opt == nullptr)
                throw ArgumentError("feedback entry does not cover cog '" + cog_id + "'");
            counts[catalog.option_index(cog_id, *opt)] += 1.0;
            ++n;
        }
        const double denom = static_cast<double>(n) + static_cast<double>(m) * smoothing;
        for (auto& c : counts)
            c = n == 0 ? 1.0 / static_cast<double>(m) : (c + smoothing) / denom;
        masses.push_back(std::move(counts));
    }
    return masses;
}

struct DensityModel {
    std::vector<std::string> scope;
    std::vector<std::vector<double>> l;
    std::vector<std::vector<double>> g;
    double gamma = 0.25;
    double split_score = 0.0;
    bool degenerate = false;
    std::size_t n_entries = 0;

    /// log prod_cogs l/g for a candidate given as option indices.
    double log_ratio(std::span<const std::size_t> candidate) const
    {
        double s = 0.0;
        for (std::size_t c = 0; c < candidate.size(); ++c)
            s += std::log(l[c][candidate[c]]) - std::log(g[c][candidate[c]]);
        return s;
    }
};

inline DensityModel fit_tpe(const FeedbackSet& feedback, const CogCatalog& catalog, const EvaluatorSpec& spec,
                            const TpeOptions& opts = {})
{
    DensityModel model;
    model.scope = feedback.scope;
    model.gamma = opts.gamma;
    model.n_entries = feedback.entries.size();
    std::vector<FeedbackEntry> good, bad;
    if (!feedback.entries.empty()) {
        const Split split = split_observations(feedback, spec, opts.gamma);
        for (auto i : split.l)
            good.push_back(feedback.entries[i]);
        for (auto i : split.g)
            bad.push_back(feedback.entries[i]);
        model.split_score = split.split_score;
        model.degenerate = split.degenerate;
    }
    model.l = fit_density(good, model.scope, catalog, opts.smoothing);
    model.g = fit_density(bad, model.scope, catalog, opts.smoothing);
    return model;
}

using Candidate = std::vector<std::size_t>;

/// Draws candidates independently per cog from l(x).
inline std::vector<Candidate> tpe_candidates(const DensityModel& model, int n_candidates, Rng& rng)
{
    std::vector<Candidate> out(static_cast<std::size_t>(std::max(1, n_candidates)));
    for (auto& cand : out) {
        cand.reserve(model.scope.size());
        for (const auto& mass : model.l)
            cand.push_back(rng.categorical(mass));
    }
    return out;
}

/// Index of the candidate with the largest l/g ratio; ties keep the earliest.
/// Candidates rejected by `allowed` are skipped unless none is allowed.
inline std::size_t tpe_select(const DensityModel& model, std::span<const Candidate> candidates,
                              const std::function<bool(const Candidate&)>& allowed = {})
{
    auto pick = [&](bool filter) -> std::ptrdiff_t {
        std::ptrdiff_t best = -1;
        double best_score = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (filter && !allowed(candidates[i]))
                continue;
            const double s = model.log_ratio(candidates[i]);
            // Relative slack so mathematically equal ratios summed in a
            // different order still count as ties.
            if (best < 0 || s > best_score + 1e-12 * std::max(1.0, std::abs(best_score))) {
                best = static_cast<std::ptrdiff_t>(i);
                best_score = s;
            }
        }
        return best;
    };
    if (allowed) {
        const auto b = pick(true);
        if (b >= 0)
            return static_cast<std::size_t>(b);
    }
    return static_cast<std::size_t>(pick(false));
}

inline Configuration candidate_to_config(const DensityModel& model, const Candidate& cand, const CogCatalog& catalog)
{
    Configuration c;
    c.catalog_version = catalog.version();
    for (std::size_t i = 0; i < model.scope.size(); ++i)
        c.assignments[model.scope[i]] = catalog.at(model.scope[i]).options[cand[i]].id;
    return c;
}

struct SampleOptions {
    TpeOptions tpe;
    /// Keys (canonical, over the scope) that should not be proposed again.
    const std::set<std::string>* exclude = nullptr;
    /// Avoid repeating a configuration within one call.
    bool distinct = false;
};

/// Proposes n configurations over the feedback scope. The model is fitted
/// once per call.
inline std::vector<Configuration> tpe_sample(const FeedbackSet& feedback, const CogCatalog& catalog, int n, Rng& rng,
                                             const EvaluatorSpec& spec, const SampleOptions& opts = {},
                                             DensityModel* fitted = nullptr)
{
    if (n < 1)
        throw ArgumentError("tpe_sample: n must be >= 1");
    std::vector<Configuration> out;
    if (feedback.scope.empty()) {
        out.assign(static_cast<std::size_t>(n), Configuration{{}, catalog.version()});
        return out;
    }
    DensityModel model = fit_tpe(feedback, catalog, spec, opts.tpe);
    std::set<std::string> picked;
    for (int i = 0; i < n; ++i) {
        const auto cands = tpe_candidates(model, opts.tpe.n_candidates, rng);
        std::function<bool(const Candidate&)> allowed;
        if (opts.exclude != nullptr || opts.distinct) {
            allowed = [&](const Candidate& c) {
                const auto key = canonical_key(candidate_to_config(model, c, catalog));
                if (opts.exclude != nullptr && opts.exclude->count(key) != 0)
                    return false;
                return !(opts.distinct && picked.count(key) != 0);
            };
        }
        const auto best = tpe_select(model, cands, allowed);
        auto config = candidate_to_config(model, cands[best], catalog);
        if (opts.distinct)
            picked.insert(canonical_key(config));
        out.push_back(std::move(config));
    }
    if (fitted != nullptr)
        *fitted = std::move(model);
    return out;
}

inline json density_to_json(const DensityModel& model)
{
    json l = json::object(), g = json::object();
    for (std::size_t i = 0; i < model.scope.size(); ++i) {
        l[model.scope[i]] = model.l[i];
        g[model.scope[i]] = model.g[i];
    }
    return {{"scope", model.scope}, {"gamma", model.gamma},   {"split_score", model.split_score},
            {"degenerate", model.degenerate}, {"entries", model.n_entries}, {"l", l}, {"g", g}};
}

} // namespace adaseek

#endif
