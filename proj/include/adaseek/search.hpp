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

#ifndef ADASEEK_SEARCH_HPP
#define ADASEEK_SEARCH_HPP

// Recursive layer search.
//
// The innermost layer draws single TPE samples, completes them with the
// configuration chosen by the enclosing layers, and evaluates them. Every
// other layer samples chunks of W configurations over its own cogs and runs
// successive halving on each chunk: at rung s each surviving member gets a
// nested search with budget r0 * eta^s, then only the best floor(|chunk|/eta)
// members continue. Per chunk, sum_s r_s * |theta_s| <= S * r0 * W, so the
// configurations proposed at a layer never exceed the product of the budgets
// of the layers at and above it.
//
// Nested searches run against a buffered view of the archive and are merged
// back in member order, so serial and parallel schedules produce the same
// archive.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cogspace.hpp"
#include "evaluator.hpp"
#include "objectives.hpp"
#include "random.hpp"
#include "surrogate.hpp"

namespace adaseek {

// --- rung schedule -------------------------------------------------------------

struct RungSchedule {
    int eta = 2;
    std::int64_t r0 = 1;
    int rungs = 1; // S
    std::vector<std::int64_t> budgets; // r_s for s in [0, S)
};

/// r0 = ceil(B/eta), S = max(1, floor(B/r0)), r_s = r0 * eta^s. B is the
/// next (inner) layer's assigned budget.
inline RungSchedule make_rung_schedule(std::int64_t next_layer_budget, int eta)
{
    if (next_layer_budget < 1)
        throw ArgumentError("make_rung_schedule: next layer budget must be >= 1");
    if (eta < 2)
        throw ArgumentError("make_rung_schedule: eta must be >= 2");
    RungSchedule sched;
    sched.eta = eta;
    sched.r0 = (next_layer_budget + eta - 1) / eta;
    sched.rungs = static_cast<int>(std::max<std::int64_t>(1, next_layer_budget / sched.r0));
    std::int64_t r = sched.r0;
    for (int s = 0; s < sched.rungs; ++s) {
        sched.budgets.push_back(r);
        r *= eta;
    }
    return sched;
}

/// Survivors after one rung: indices (into `scored`) of the floor(n/eta)
/// best members under rank_for_search, best first.
inline std::vector<std::size_t> halve(std::span<const RankItem> scored, int eta, const EvaluatorSpec& spec)
{
    const auto order = rank_for_search(scored, spec);
    const std::size_t keep = scored.size() / static_cast<std::size_t>(eta);
    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep)};
}

// --- early stop ------------------------------------------------------------------

struct EarlyStopState {
    int window = 3;
    double epsilon = 1e-3;
    std::deque<double> history; // at most window + 1 entries
};

/// Records the latest best score. True once window+1 values are held and the
/// best of the last `window` improves on the value before them by less than
/// epsilon * max(1, |previous|).
inline bool early_stop_check(EarlyStopState& state, double new_best)
{
    state.history.push_back(new_best);
    while (state.history.size() > static_cast<std::size_t>(state.window) + 1)
        state.history.pop_front();
    if (state.history.size() < static_cast<std::size_t>(state.window) + 1)
        return false;
    const double previous = state.history.front();
    const double recent = *std::max_element(state.history.begin() + 1, state.history.end());
    if (recent == kInfeasibleScore)
        return true; // nothing feasible in the window
    if (previous == kInfeasibleScore)
        return false;
    const double gain = recent - previous;
    return gain < state.epsilon * std::max(1.0, std::abs(previous));
}

// --- feedback projection ----------------------------------------------------------

/// Collapses entries to `scope`; each distinct assignment keeps its best entry
/// under rank_for_search. Output follows first appearance.
inline FeedbackSet project_feedback(const FeedbackSet& child, std::span<const std::string> scope,
                                    const EvaluatorSpec& spec)
{
    FeedbackSet out;
    out.scope.assign(scope.begin(), scope.end());
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < child.entries.size(); ++i) {
        auto key = canonical_key(restrict_to(child.entries[i].config, scope));
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted)
            order.push_back(key);
        it->second.push_back(i);
    }
    out.entries.reserve(order.size());
    for (const auto& key : order) {
        const auto& members = groups[key];
        std::size_t best = members.front();
        if (members.size() > 1) {
            std::vector<RankItem> items;
            items.reserve(members.size());
            for (auto i : members)
                items.push_back(child.entries[i].rank_item());
            best = members[rank_for_search(std::span<const RankItem>(items), spec).front()];
        }
        FeedbackEntry e = child.entries[best];
        e.config = restrict_to(e.config, scope);
        out.entries.push_back(std::move(e));
    }
    return out;
}

inline FeedbackEntry feedback_entry(const Observation& o, const EvaluatorSpec& spec)
{
    return {o.config, raw_score(o.metrics, spec), o.feasible, o.metrics, o.eval_index};
}

// --- archive views --------------------------------------------------------------

/// Either the global archive (records append directly) or a buffered child of
/// another view. Reads see the parent chain followed by the local buffer.
class ArchiveView {
public:
    explicit ArchiveView(ResultArchive& root) : root_(&root), base_(static_cast<std::int64_t>(root.size())) {}
    explicit ArchiveView(const ArchiveView* parent) : parent_(parent), base_(parent->next_index()) {}

    ArchiveView(const ArchiveView&) = delete;
    ArchiveView& operator=(const ArchiveView&) = delete;

    std::int64_t next_index() const
    {
        return root_ != nullptr ? static_cast<std::int64_t>(root_->size())
                                : base_ + static_cast<std::int64_t>(local_.size());
    }

    Observation record(Observation o)
    {
        if (root_ != nullptr)
            return root_->append(std::move(o));
        o.eval_index = next_index();
        keys_.try_emplace(o.key(), local_.size());
        local_.push_back(o);
        return o;
    }

    std::vector<Observation> absorb(const std::vector<Observation>& obs)
    {
        std::vector<Observation> out;
        out.reserve(obs.size());
        for (const auto& o : obs)
            out.push_back(record(o));
        return out;
    }

    const Observation* find_key(const std::string& key) const
    {
        if (root_ != nullptr) {
            const auto* hits = root_->lookup(key);
            return hits == nullptr ? nullptr : &(*root_)[static_cast<std::size_t>(hits->front())];
        }
        if (const auto* p = parent_->find_key(key))
            return p;
        auto it = keys_.find(key);
        return it == keys_.end() ? nullptr : &local_[it->second];
    }

    template <class F>
    void for_each(F&& f) const
    {
        if (root_ != nullptr) {
            for (const auto& o : root_->observations())
                f(o);
            return;
        }
        parent_->for_each(f);
        for (const auto& o : local_)
            f(o);
    }

    /// Observations recorded through this view.
    std::vector<Observation> local() const
    {
        if (root_ != nullptr)
            return {root_->observations().begin() + base_, root_->observations().end()};
        return local_;
    }

private:
    ResultArchive* root_ = nullptr;
    const ArchiveView* parent_ = nullptr;
    std::int64_t base_ = 0;
    std::vector<Observation> local_;
    std::unordered_map<std::string, std::size_t> keys_;
};

// --- accounting -------------------------------------------------------------------

struct ChunkRecord {
    int round = 0;
    int layer = 0;
    std::string path;
    std::int64_t chunk_id = 0;
    std::int64_t n = 0;
    int W = 0;
    int eta = 2;
    std::int64_t r0 = 0;
    int S = 0;
    std::vector<std::int64_t> rung_budget; // r_s per executed rung
    std::vector<std::int64_t> rung_theta;  // |theta_s| per executed rung
    std::vector<std::vector<std::string>> survivors;
    bool early_stopped = false;

    std::int64_t rung_sum() const
    {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < rung_budget.size(); ++i)
            s += rung_budget[i] * rung_theta[i];
        return s;
    }
    std::int64_t bound() const { return static_cast<std::int64_t>(S) * r0 * W; }

    json to_json() const
    {
        json rungs = json::array();
        for (std::size_t i = 0; i < rung_budget.size(); ++i) {
            json r = {{"s", i}, {"r_s", rung_budget[i]}, {"theta", rung_theta[i]}};
            if (i < survivors.size())
                r["survivors"] = survivors[i];
            rungs.push_back(std::move(r));
        }
        return {{"round", round}, {"layer", layer}, {"path", path},       {"chunk_id", chunk_id},
                {"n", n},         {"W", W},         {"eta", eta},         {"r0", r0},
                {"S", S},         {"rungs", rungs}, {"sum", rung_sum()}, {"bound", bound()},
                {"early_stopped", early_stopped}};
    }
};

struct SearchRecord {
    std::vector<std::int64_t> proposals; // per layer, innermost first
    std::vector<ChunkRecord> chunks;
    std::vector<json> surrogate;

    void absorb(SearchRecord&& other)
    {
        if (proposals.size() < other.proposals.size())
            proposals.resize(other.proposals.size(), 0);
        for (std::size_t i = 0; i < other.proposals.size(); ++i)
            proposals[i] += other.proposals[i];
        std::move(other.chunks.begin(), other.chunks.end(), std::back_inserter(chunks));
        std::move(other.surrogate.begin(), other.surrogate.end(), std::back_inserter(surrogate));
    }
};

// --- layer search -------------------------------------------------------------------

struct SearchKnobs {
    int eta = 2;
    int chunk_size = 8; // W
    TpeOptions tpe;
    bool early_stop = true;
    int es_window = 3;
    double es_epsilon = 1e-3;
    bool dedup = true; // never re-propose an evaluated innermost configuration
    int parallel = 1;
    bool surrogate_trace = false;
};

struct SearchContext {
    const CogCatalog* catalog = nullptr;
    const Evaluator* evaluator = nullptr;
    EvaluatorSpec spec;
    SearchKnobs knobs;
    std::vector<std::vector<std::string>> layers; // innermost first
    std::vector<std::int64_t> budgets;            // B_i, innermost first
    int round_L = 1;
    std::uint64_t seed = 0;
    std::int64_t* chunk_counter = nullptr;  // run-global top-level chunk ids
    std::function<void()> on_chunk_end;     // top level only, exclusive access
};

struct SearchResult {
    std::vector<Observation> observations; // this call's evaluations, in order
    bool converged = false;
};

/// True when a sub-search of at least `window` evaluations never beat
/// `prior`, the best result known before it started, by the relative margin.
inline bool stalled_against(std::span<const Observation> obs, double prior, const SearchKnobs& knobs,
                            const EvaluatorSpec& spec)
{
    if (obs.size() < static_cast<std::size_t>(std::max(1, knobs.es_window)))
        return false;
    double best = kInfeasibleScore;
    for (const auto& o : obs)
        best = std::max(best, effective_score(o, spec));
    return best - prior < knobs.es_epsilon * std::max(1.0, std::abs(prior));
}

class LayerSearch {
public:
    explicit LayerSearch(const SearchContext& ctx) : ctx_(ctx) {}

    /// Searches `layer` (1 = innermost) under `chosen` with `budget`
    /// configurations proposed at this layer.
    SearchResult run(ArchiveView& view, SearchRecord& rec, const Configuration& chosen, int layer,
                     std::int64_t budget, std::uint64_t seed, bool top, std::int64_t chunk_id,
                     const std::string& path) const
    {
        if (rec.proposals.size() < ctx_.layers.size())
            rec.proposals.resize(ctx_.layers.size(), 0);
        if (budget <= 0)
            return {};
        if (layer == 1)
            return innermost(view, rec, chosen, budget, seed, top, chunk_id, path);
        return outer(view, rec, chosen, layer, budget, seed, top, chunk_id, path);
    }

    /// Projection of every archived observation consistent with `chosen`
    /// onto `scope`.
    FeedbackSet gather(const ArchiveView& view, const Configuration& chosen, std::span<const std::string> scope) const
    {
        FeedbackSet raw;
        raw.scope.assign(scope.begin(), scope.end());
        view.for_each([&](const Observation& o) {
            if (extends(o.config, chosen))
                raw.entries.push_back(feedback_entry(o, ctx_.spec));
        });
        return project_feedback(raw, scope, ctx_.spec);
    }

private:
    std::int64_t next_chunk_id() const { return ctx_.chunk_counter != nullptr ? (*ctx_.chunk_counter)++ : 0; }

    void chunk_end(bool top) const
    {
        if (top && ctx_.on_chunk_end)
            ctx_.on_chunk_end();
    }

    Observation evaluate(ArchiveView& view, const Configuration& config, std::int64_t chunk_id,
                         std::uint64_t nonce) const
    {
        Observation obs;
        obs.config = ctx_.catalog->stamp(config);
        obs.chunk_id = chunk_id;
        obs.layer_round = ctx_.round_L;
        if (const Observation* hit = view.find_key(canonical_key(config))) {
            obs.metrics = hit->metrics;
            obs.failed = hit->failed;
            obs.cached = true;
        } else {
            try {
                obs.metrics = ctx_.evaluator->evaluate(obs.config, nonce);
                if (!obs.metrics.valid())
                    throw std::runtime_error("evaluator returned non-finite or negative metrics");
            } catch (const std::exception&) {
                obs.metrics = MetricVector{};
                obs.failed = true;
            }
        }
        obs.feasible = !obs.failed && feasible(obs.metrics, ctx_.spec);
        return view.record(std::move(obs));
    }

    SampleOptions sample_options() const
    {
        SampleOptions o;
        o.tpe = ctx_.knobs.tpe;
        return o;
    }

    SearchResult innermost(ArchiveView& view, SearchRecord& rec, const Configuration& chosen, std::int64_t budget,
                           std::uint64_t seed, bool top, std::int64_t chunk_id, const std::string& path) const
    {
        const auto& scope = ctx_.layers.front();
        const int W = std::max(1, ctx_.knobs.chunk_size);
        Rng rng(seed);
        EarlyStopState es{ctx_.knobs.es_window, ctx_.knobs.es_epsilon, {}};
        double best = kInfeasibleScore;
        SearchResult result;
        std::int64_t cid = top ? next_chunk_id() : chunk_id;
        for (std::int64_t k = 0; k < budget; ++k) {
            if (top && k > 0 && k % W == 0) {
                chunk_end(top);
                cid = next_chunk_id();
            }
            // The surrogate learns from the whole archive; dedup stays local to `chosen`.
            const FeedbackSet fb = gather(view, Configuration{}, scope);
            std::set<std::string> seen;
            SampleOptions opts = sample_options();
            if (ctx_.knobs.dedup) {
                for (const auto& e : gather(view, chosen, scope).entries)
                    seen.insert(canonical_key(e.config));
                opts.exclude = &seen;
            }
            const auto lambda = tpe_sample(fb, *ctx_.catalog, 1, rng, ctx_.spec, opts).front();
            const auto obs =
                evaluate(view, merge(chosen, lambda), cid, derive_seed(seed, {static_cast<std::uint64_t>(k)}));
            rec.proposals[0] += 1;
            result.observations.push_back(obs);
            best = std::max(best, effective_score(obs, ctx_.spec));
            if (ctx_.knobs.early_stop && early_stop_check(es, best)) {
                result.converged = true;
                break;
            }
        }
        (void)path;
        chunk_end(top);
        return result;
    }

    struct ChildOutcome {
        std::vector<Observation> observations;
        SearchRecord rec;
    };

    SearchResult outer(ArchiveView& view, SearchRecord& rec, const Configuration& chosen, int layer,
                       std::int64_t budget, std::uint64_t seed, bool top, std::int64_t chunk_id,
                       const std::string& path) const
    {
        const auto& scope = ctx_.layers[static_cast<std::size_t>(layer - 1)];
        const std::int64_t next_budget = ctx_.budgets[static_cast<std::size_t>(layer - 2)];

        if (scope.empty()) {
            // Nothing to choose here: pass straight through with the same
            // upper choice.
            rec.proposals[static_cast<std::size_t>(layer - 1)] += budget;
            return run(view, rec, chosen, layer - 1, budget * next_budget, derive_seed(seed, {0}), top, chunk_id,
                       path + "/e");
        }

        const int W = std::max(1, ctx_.knobs.chunk_size);
        const RungSchedule sched = make_rung_schedule(next_budget, ctx_.knobs.eta);
        EarlyStopState layer_es{ctx_.knobs.es_window, ctx_.knobs.es_epsilon, {}};
        double best = kInfeasibleScore;
        SearchResult result;
        std::int64_t used = 0;
        for (std::uint64_t c = 0; used < budget; ++c) {
            const std::int64_t n = std::min<std::int64_t>(W, budget - used);
            used += n;
            const std::int64_t cid = top ? next_chunk_id() : chunk_id;
            const std::string cpath = path + "/c" + std::to_string(c);

            const FeedbackSet fb = gather(view, Configuration{}, scope);
            Rng rng(derive_seed(seed, {1, c}));
            SampleOptions opts = sample_options();
            opts.distinct = ctx_.knobs.dedup;
            DensityModel model;
            const auto thetas = tpe_sample(fb, *ctx_.catalog, static_cast<int>(n), rng, ctx_.spec, opts, &model);
            rec.proposals[static_cast<std::size_t>(layer - 1)] += n;
            if (ctx_.knobs.surrogate_trace)
                rec.surrogate.push_back(
                    {{"round", ctx_.round_L}, {"layer", layer}, {"path", cpath}, {"model", density_to_json(model)}});

            ChunkRecord cr;
            cr.round = ctx_.round_L;
            cr.layer = layer;
            cr.path = cpath;
            cr.chunk_id = cid;
            cr.n = n;
            cr.W = W;
            cr.eta = sched.eta;
            cr.r0 = sched.r0;
            cr.S = sched.rungs;

            std::vector<Observation> chunk_obs;
            std::vector<std::size_t> alive(thetas.size());
            std::iota(alive.begin(), alive.end(), std::size_t{0});
            for (int s = 0; s < sched.rungs && !alive.empty(); ++s) {
                const std::int64_t r_s = sched.budgets[static_cast<std::size_t>(s)];
                cr.rung_budget.push_back(r_s);
                cr.rung_theta.push_back(static_cast<std::int64_t>(alive.size()));

                auto run_child = [&, s, r_s](std::size_t theta_idx) {
                    ChildOutcome out;
                    ArchiveView child_view(&view);
                    const auto child_seed =
                        derive_seed(seed, {2, c, static_cast<std::uint64_t>(theta_idx), static_cast<std::uint64_t>(s)});
                    run(child_view, out.rec, merge(chosen, thetas[theta_idx]), layer - 1, r_s, child_seed, false, cid,
                        cpath + "/t" + std::to_string(theta_idx) + "s" + std::to_string(s));
                    out.observations = child_view.local();
                    return out;
                };
                double prior = kInfeasibleScore;
                view.for_each([&](const Observation& o) { prior = std::max(prior, effective_score(o, ctx_.spec)); });
                std::vector<ChildOutcome> outcomes(alive.size());
                if (top && ctx_.knobs.parallel > 1) {
                    const std::size_t width = static_cast<std::size_t>(ctx_.knobs.parallel);
                    for (std::size_t lo = 0; lo < alive.size(); lo += width) {
                        const std::size_t hi = std::min(alive.size(), lo + width);
                        std::vector<std::future<ChildOutcome>> futures;
                        for (std::size_t j = lo; j < hi; ++j)
                            futures.push_back(std::async(std::launch::async, run_child, alive[j]));
                        for (std::size_t j = lo; j < hi; ++j)
                            outcomes[j] = futures[j - lo].get();
                    }
                } else {
                    for (std::size_t j = 0; j < alive.size(); ++j)
                        outcomes[j] = run_child(alive[j]);
                }

                std::vector<std::size_t> remaining;
                for (std::size_t j = 0; j < alive.size(); ++j) {
                    auto recorded = view.absorb(outcomes[j].observations);
                    rec.absorb(std::move(outcomes[j].rec));
                    const bool converged =
                        ctx_.knobs.early_stop && stalled_against(recorded, prior, ctx_.knobs, ctx_.spec);
                    chunk_obs.insert(chunk_obs.end(), recorded.begin(), recorded.end());
                    if (!converged)
                        remaining.push_back(alive[j]);
                }

                // Rank surviving members by the best result found under each.
                FeedbackSet chunk_fb;
                chunk_fb.scope = scope;
                for (const auto& o : chunk_obs)
                    chunk_fb.entries.push_back(feedback_entry(o, ctx_.spec));
                const FeedbackSet projected = project_feedback(chunk_fb, scope, ctx_.spec);
                std::unordered_map<std::string, const FeedbackEntry*> by_key;
                for (const auto& e : projected.entries)
                    by_key.emplace(canonical_key(e.config), &e);
                std::vector<RankItem> items;
                for (auto idx : remaining) {
                    auto it = by_key.find(canonical_key(thetas[idx]));
                    RankItem item;
                    if (it != by_key.end())
                        item = it->second->rank_item();
                    else
                        item = {MetricVector{}, kInfeasibleScore, false, std::numeric_limits<std::int64_t>::max()};
                    items.push_back(item);
                }
                const auto keep = halve(items, ctx_.knobs.eta, ctx_.spec);
                std::vector<std::size_t> next;
                std::vector<std::string> keys;
                for (auto k : keep) {
                    next.push_back(remaining[k]);
                    keys.push_back(canonical_key(thetas[remaining[k]]));
                }
                cr.survivors.push_back(std::move(keys));
                alive = std::move(next);
            }

            for (const auto& o : chunk_obs) {
                best = std::max(best, effective_score(o, ctx_.spec));
                result.observations.push_back(o);
            }
            bool stop = false;
            if (ctx_.knobs.early_stop && early_stop_check(layer_es, best)) {
                stop = true;
                cr.early_stopped = true;
                result.converged = true;
            }
            rec.chunks.push_back(std::move(cr));
            chunk_end(top);
            if (stop)
                break;
        }
        return result;
    }

    const SearchContext& ctx_;
};

} // namespace adaseek

#endif
