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

#ifndef ADASEEK_SIMFLOW_HPP
#define ADASEEK_SIMFLOW_HPP

// Seeded synthetic workflows.
//
// A workflow is a chain of steps with a few extra forward edges. Every step
// carries cogs: architecture cogs rewrite the step (decompose into two
// sub-steps or fan out to k samplers plus an aggregator), step and weight
// cogs shift the step's cost and latency and add a quality effect. Quality is
// logistic(sum of option effects + pairwise interaction terms + noise). Cost
// sums over executed node instances; latency is the longest entry-to-exit
// path.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cogspace.hpp"
#include "driver.hpp"
#include "errors.hpp"
#include "evaluator.hpp"
#include "objectives.hpp"
#include "random.hpp"

namespace adaseek {

enum class StepKind { model_call, tool_call, code, retrieval };

inline std::string_view to_string(StepKind k)
{
    switch (k) {
    case StepKind::model_call:
        return "model_call";
    case StepKind::tool_call:
        return "tool_call";
    case StepKind::code:
        return "code";
    case StepKind::retrieval:
        return "retrieval";
    }
    return "model_call";
}

struct StepNode {
    std::string id;
    StepKind kind = StepKind::model_call;
    double base_cost = 1.0;
    double base_latency = 1.0;
    int iteration_bound = 1;
    /// Step whose cog deltas apply here, scaled by delta_scale. Empty for
    /// aggregators.
    std::string origin;
    double delta_scale = 1.0;

    bool operator==(const StepNode&) const = default;
};

struct WorkflowGraph {
    std::vector<StepNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::string entry;
    std::string exit;

    std::optional<std::size_t> index_of(std::string_view id) const
    {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id)
                return i;
        return std::nullopt;
    }

    bool contains(std::string_view id) const { return index_of(id).has_value(); }

    /// Edges to other nodes; self-loops are iteration, not messages.
    std::size_t out_degree(std::string_view id) const
    {
        std::size_t d = 0;
        for (const auto& [from, to] : edges)
            if (from == id && to != id)
                ++d;
        return d;
    }

    /// Node order with every non-loop edge pointing forward. Throws when the
    /// graph has a cycle through more than one node.
    std::vector<std::size_t> topological_order() const
    {
        const std::size_t n = nodes.size();
        std::vector<std::vector<std::size_t>> out(n);
        std::vector<std::size_t> indeg(n, 0);
        for (const auto& [from, to] : edges) {
            if (from == to)
                continue;
            const auto a = index_of(from), b = index_of(to);
            if (!a || !b)
                throw ArgumentError("edge references unknown node " + from + " -> " + to);
            out[*a].push_back(*b);
            ++indeg[*b];
        }
        std::vector<std::size_t> order, ready;
        for (std::size_t i = n; i-- > 0;)
            if (indeg[i] == 0)
                ready.push_back(i);
        while (!ready.empty()) {
            const auto i = ready.back();
            ready.pop_back();
            order.push_back(i);
            for (auto j : out[i])
                if (--indeg[j] == 0)
                    ready.push_back(j);
        }
        if (order.size() != n)
            throw ArgumentError("workflow graph has a multi-node cycle; only self-loops are supported");
        return order;
    }

    void validate() const
    {
        std::set<std::string> ids;
        for (const auto& node : nodes) {
            if (!ids.insert(node.id).second)
                throw ArgumentError("duplicate node id " + node.id);
            if (node.iteration_bound < 1)
                throw ArgumentError("node " + node.id + " has iteration bound < 1");
            if (!std::isfinite(node.base_cost) || !std::isfinite(node.base_latency) || node.base_cost < 0.0 ||
                node.base_latency < 0.0)
                throw ArgumentError("node " + node.id + " has invalid base cost or latency");
        }
        if (!contains(entry) || !contains(exit))
            throw ArgumentError("entry or exit node missing");
        (void)topological_order();
        // entry must reach exit
        std::set<std::string> seen{entry};
        std::vector<std::string> stack{entry};
        while (!stack.empty()) {
            const auto cur = stack.back();
            stack.pop_back();
            for (const auto& [from, to] : edges)
                if (from == cur && seen.insert(to).second)
                    stack.push_back(to);
        }
        if (seen.count(exit) == 0)
            throw ArgumentError("exit is not reachable from entry");
    }

    json to_json() const
    {
        json ns = json::array();
        for (const auto& n : nodes)
            ns.push_back({{"id", n.id},
                          {"kind", std::string(to_string(n.kind))},
                          {"base_cost", n.base_cost},
                          {"base_latency", n.base_latency},
                          {"iteration_bound", n.iteration_bound},
                          {"origin", n.origin},
                          {"delta_scale", n.delta_scale}});
        json es = json::array();
        for (const auto& [a, b] : edges)
            es.push_back({a, b});
        return {{"nodes", ns}, {"edges", es}, {"entry", entry}, {"exit", exit}};
    }

    bool operator==(const WorkflowGraph&) const = default;
};

// --- surface -----------------------------------------------------------------------

struct SurfaceParams {
    std::uint64_t seed = 0;
    int n_steps = 3;
    int cogs_per_step = 2;
    int options_per_cog = 4;
    double interaction_density = 0.3;
    double noise_sd = 0.0;
    double effect_sd = 0.5;
    double interaction_sd = 0.5;
    double effect_max = 2.0;
    double edge_probability = 0.3; // extra forward edges beyond the chain
    double loop_probability = 0.0; // steps that iterate twice
    double cost_coupling = 0.6;    // how much an option's effect raises its cost
    double aggregation_penalty = 0.05;
    double decompose_fraction = 0.6;
    double aggregator_fraction = 0.2;
    bool dynamic_weights = false;

    json to_json() const
    {
        return {{"seed", seed},
                {"n_steps", n_steps},
                {"cogs_per_step", cogs_per_step},
                {"options_per_cog", options_per_cog},
                {"interaction_density", interaction_density},
                {"noise_sd", noise_sd},
                {"effect_sd", effect_sd},
                {"interaction_sd", interaction_sd},
                {"effect_max", effect_max},
                {"edge_probability", edge_probability},
                {"loop_probability", loop_probability},
                {"cost_coupling", cost_coupling},
                {"aggregation_penalty", aggregation_penalty},
                {"decompose_fraction", decompose_fraction},
                {"aggregator_fraction", aggregator_fraction},
                {"dynamic_weights", dynamic_weights}};
    }

    static SurfaceParams from_json(const json& j)
    {
        static const std::set<std::string> known = {
            "seed",          "n_steps",          "cogs_per_step",       "options_per_cog",    "interaction_density",
            "noise_sd",      "effect_sd",        "interaction_sd",      "effect_max",         "edge_probability",
            "loop_probability", "cost_coupling", "aggregation_penalty", "decompose_fraction", "aggregator_fraction",
            "dynamic_weights"};
        if (!j.is_object())
            throw SchemaError("surface spec must be an object");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (known.count(it.key()) == 0)
                throw SchemaError("unknown field '" + it.key() + "' in surface spec");
        SurfaceParams p;
        p.seed = j.value("seed", p.seed);
        p.n_steps = j.value("n_steps", p.n_steps);
        p.cogs_per_step = j.value("cogs_per_step", p.cogs_per_step);
        p.options_per_cog = j.value("options_per_cog", p.options_per_cog);
        p.interaction_density = j.value("interaction_density", p.interaction_density);
        p.noise_sd = j.value("noise_sd", p.noise_sd);
        p.effect_sd = j.value("effect_sd", p.effect_sd);
        p.interaction_sd = j.value("interaction_sd", p.interaction_sd);
        p.effect_max = j.value("effect_max", p.effect_max);
        p.edge_probability = j.value("edge_probability", p.edge_probability);
        p.loop_probability = j.value("loop_probability", p.loop_probability);
        p.cost_coupling = j.value("cost_coupling", p.cost_coupling);
        p.aggregation_penalty = j.value("aggregation_penalty", p.aggregation_penalty);
        p.decompose_fraction = j.value("decompose_fraction", p.decompose_fraction);
        p.aggregator_fraction = j.value("aggregator_fraction", p.aggregator_fraction);
        p.dynamic_weights = j.value("dynamic_weights", p.dynamic_weights);
        return p;
    }
};

struct OptionEffect {
    std::string id;
    double effect = 0.0;        // logit contribution
    double cost_delta = 0.0;    // per instance of the target step
    double latency_delta = 0.0;
    std::size_t base_index = 0; // row/column in interaction tables
    json payload;               // architecture rewrite for architecture cogs
    std::vector<double> pool;   // sub-step or sampler effects behind `effect`
};

struct SurfaceCog {
    std::string id;
    Category category = Category::step;
    std::string target;
    std::vector<OptionEffect> options;

    const OptionEffect* find(std::string_view option) const
    {
        for (const auto& o : options)
            if (o.id == option)
                return &o;
        return nullptr;
    }
};

struct Interaction {
    std::size_t a = 0; // surface cog positions
    std::size_t b = 0;
    std::vector<std::vector<double>> table; // [option of a][option of b]
};

struct LatentSurface {
    SurfaceParams params;
    std::vector<SurfaceCog> cogs;
    std::vector<Interaction> interactions;
    std::optional<std::string> optimum_key; // stored when the space is at most 2^20
    double optimum_quality = 0.0;

    const SurfaceCog* find(std::string_view cog) const
    {
        for (const auto& c : cogs)
            if (c.id == cog)
                return &c;
        return nullptr;
    }

    json to_json() const
    {
        json cs = json::array();
        for (const auto& c : cogs) {
            json os = json::array();
            for (const auto& o : c.options)
                os.push_back({{"id", o.id},
                              {"effect", o.effect},
                              {"cost_delta", o.cost_delta},
                              {"latency_delta", o.latency_delta},
                              {"base_index", o.base_index},
                              {"payload", o.payload},
                              {"pool", o.pool}});
            cs.push_back({{"id", c.id},
                          {"category", std::string(to_string(c.category))},
                          {"target", c.target},
                          {"options", os}});
        }
        json is = json::array();
        for (const auto& it : interactions)
            is.push_back({{"a", cogs[it.a].id}, {"b", cogs[it.b].id}, {"table", it.table}});
        json out = {{"params", params.to_json()}, {"cogs", cs}, {"interactions", is}};
        if (optimum_key) {
            out["optimum_key"] = *optimum_key;
            out["optimum_quality"] = optimum_quality;
        }
        return out;
    }
};

struct SimWorkflow {
    WorkflowGraph graph;
    CogCatalog catalog;
    LatentSurface surface;

    json dump() const
    {
        return {{"graph", graph.to_json()}, {"catalog", catalog_to_json(catalog)}, {"surface", surface.to_json()}};
    }
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace detail {

inline const OptionEffect& option_for(const LatentSurface& surface, const SurfaceCog& cog, const Configuration& config)
{
    const std::string* opt = config.find(cog.id);
    if (opt == nullptr)
        throw ContractError("configuration does not assign cog '" + cog.id + "'");
    const OptionEffect* e = cog.find(*opt);
    if (e == nullptr)
        throw ContractError("unknown option '" + *opt + "' for cog '" + cog.id + "'");
    (void)surface;
    return *e;
}

inline double clip(double x, double bound) { return std::clamp(x, -bound, bound); }

} // namespace detail

/// Noiseless logit of a configuration.
inline double latent_logit(const LatentSurface& surface, const Configuration& config)
{
    double z = 0.0;
    std::vector<std::size_t> rows(surface.cogs.size());
    for (std::size_t i = 0; i < surface.cogs.size(); ++i) {
        const auto& e = detail::option_for(surface, surface.cogs[i], config);
        z += e.effect;
        rows[i] = e.base_index;
    }
    for (const auto& it : surface.interactions)
        z += it.table[rows[it.a]][rows[it.b]];
    return z;
}

// --- rewrites -----------------------------------------------------------------------

struct RewriteParams {
    double decompose_fraction = 0.6;
    double aggregator_fraction = 0.2;
};

/// Applies an architecture option to the node `target`. The input graph is
/// not modified.
inline WorkflowGraph apply_architecture_option(const WorkflowGraph& graph, const std::string& target,
                                               const json& payload, const RewriteParams& rp = {})
{
    const std::string rewrite = payload.is_object() ? payload.value("rewrite", std::string("none")) : "none";
    if (rewrite == "none" || rewrite == "global")
        return graph;
    const auto pos = graph.index_of(target);
    if (!pos)
        throw ArgumentError("architecture option targets unknown node '" + target + "'");
    const StepNode original = graph.nodes[*pos];
    const std::string origin = original.origin.empty() ? original.id : original.origin;

    std::vector<StepNode> heads, tails, added;
    std::vector<std::pair<std::string, std::string>> internal;
    if (rewrite == "decompose") {
        StepNode first = original, second = original;
        first.id = original.id + ".d1";
        second.id = original.id + ".d2";
        for (StepNode* n : {&first, &second}) {
            n->base_cost = original.base_cost * rp.decompose_fraction;
            n->base_latency = original.base_latency * rp.decompose_fraction;
            n->origin = origin;
            n->delta_scale = original.delta_scale * rp.decompose_fraction;
        }
        internal.emplace_back(first.id, second.id);
        heads = {first};
        tails = {second};
        added = {first, second};
    } else if (rewrite == "ensemble") {
        const int k = payload.value("k", 2);
        if (k < 1)
            throw ArgumentError("ensemble size must be >= 1");
        StepNode agg;
        agg.id = original.id + ".agg";
        agg.kind = StepKind::code;
        agg.base_cost = original.base_cost * rp.aggregator_fraction;
        agg.base_latency = original.base_latency * rp.aggregator_fraction;
        agg.iteration_bound = 1;
        agg.origin.clear();
        agg.delta_scale = 0.0;
        for (int i = 1; i <= k; ++i) {
            StepNode s = original;
            s.id = original.id + ".e" + std::to_string(i);
            s.origin = origin;
            heads.push_back(s);
            added.push_back(s);
            internal.emplace_back(s.id, agg.id);
        }
        tails = {agg};
        added.push_back(agg);
    } else {
        throw ArgumentError("unknown architecture rewrite '" + rewrite + "'");
    }

    WorkflowGraph out;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (i == *pos)
            out.nodes.insert(out.nodes.end(), added.begin(), added.end());
        else
            out.nodes.push_back(graph.nodes[i]);
    }
    for (const auto& [from, to] : graph.edges) {
        if (from == target && to == target) {
            // iteration is carried by iteration_bound on the copies
            for (const auto& h : heads)
                if (h.iteration_bound > 1)
                    out.edges.emplace_back(h.id, h.id);
            if (rewrite == "decompose" && tails.front().iteration_bound > 1)
                out.edges.emplace_back(tails.front().id, tails.front().id);
        } else if (to == target) {
            for (const auto& h : heads)
                out.edges.emplace_back(from, h.id);
        } else if (from == target) {
            for (const auto& t : tails)
                out.edges.emplace_back(t.id, to);
        } else {
            out.edges.emplace_back(from, to);
        }
    }
    out.edges.insert(out.edges.end(), internal.begin(), internal.end());
    out.entry = graph.entry == target ? heads.front().id : graph.entry;
    out.exit = graph.exit == target ? tails.front().id : graph.exit;
    return out;
}

/// Graph after every architecture cog of `config` is applied, in surface order.
inline WorkflowGraph realized_graph(const WorkflowGraph& graph, const LatentSurface& surface,
                                    const Configuration& config)
{
    const RewriteParams rp{surface.params.decompose_fraction, surface.params.aggregator_fraction};
    WorkflowGraph g = graph;
    for (const auto& cog : surface.cogs) {
        if (cog.category != Category::architecture || cog.target == kGlobalTarget)
            continue;
        const auto& opt = detail::option_for(surface, cog, config);
        g = apply_architecture_option(g, cog.target, opt.payload, rp);
    }
    return g;
}

/// Cost and latency of a realized graph given per-step option deltas.
inline std::pair<double, double> graph_cost_latency(const WorkflowGraph& g,
                                                    const std::map<std::string, std::pair<double, double>>& deltas)
{
    const auto order = g.topological_order();
    std::vector<double> node_cost(g.nodes.size()), node_lat(g.nodes.size());
    double cost = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        double dc = 0.0, dl = 0.0;
        if (!n.origin.empty()) {
            auto it = deltas.find(n.origin);
            if (it != deltas.end()) {
                dc = it->second.first * n.delta_scale;
                dl = it->second.second * n.delta_scale;
            }
        }
        node_cost[i] = std::max(0.0, n.base_cost + dc) * n.iteration_bound;
        node_lat[i] = std::max(0.0, n.base_latency + dl) * n.iteration_bound;
        cost += node_cost[i];
    }
    // Longest path into each node; joins take the slowest branch.
    std::vector<double> finish(g.nodes.size(), 0.0);
    std::vector<std::vector<std::size_t>> preds(g.nodes.size());
    for (const auto& [from, to] : g.edges)
        if (from != to)
            preds[*g.index_of(to)].push_back(*g.index_of(from));
    for (auto i : order) {
        double start = 0.0;
        for (auto p : preds[i])
            start = std::max(start, finish[p]);
        finish[i] = start + node_lat[i];
    }
    return {cost, finish[*g.index_of(g.exit)]};
}

inline MetricVector sim_evaluate(const WorkflowGraph& graph, const LatentSurface& surface, const Configuration& config,
                                 std::uint64_t nonce = 0)
{
    double z = latent_logit(surface, config);
    if (surface.params.noise_sd > 0.0) {
        Rng rng(derive_seed(surface.params.seed, {0x6e6f697365ULL, hash_string(canonical_key(config)), nonce}));
        z += rng.normal(0.0, surface.params.noise_sd);
    }
    std::map<std::string, std::pair<double, double>> deltas;
    for (const auto& cog : surface.cogs) {
        if (cog.category == Category::architecture)
            continue;
        const auto& opt = detail::option_for(surface, cog, config);
        auto& d = deltas[cog.target];
        d.first += opt.cost_delta;
        d.second += opt.latency_delta;
    }
    const WorkflowGraph g = realized_graph(graph, surface, config);
    const auto [cost, latency] = graph_cost_latency(g, deltas);
    return {logistic(z), cost, latency};
}

// --- generation ---------------------------------------------------------------------

inline constexpr std::uint64_t kMaxSurfaceSpace = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kMaxOracleSpace = std::uint64_t{1} << 20;

inline SimWorkflow generate_surface(const SurfaceParams& p)
{
    if (p.n_steps < 1 || p.cogs_per_step < 1 || p.options_per_cog < 1)
        throw ArgumentError("generate_surface: counts must be >= 1");
    if (!(p.interaction_density >= 0.0 && p.interaction_density <= 1.0))
        throw ArgumentError("generate_surface: interaction_density must be in [0, 1]");
    if (p.noise_sd < 0.0 || p.effect_sd < 0.0 || p.interaction_sd < 0.0 || !(p.effect_max > 0.0))
        throw ArgumentError("generate_surface: spreads must be >= 0 and effect_max > 0");
    const std::int64_t n_cogs = static_cast<std::int64_t>(p.n_steps) * p.cogs_per_step;
    const double log_space = static_cast<double>(n_cogs) * std::log2(static_cast<double>(p.options_per_cog));
    if (log_space > 32.0 + 1e-12)
        throw SizeError("generate_surface: space of " + std::to_string(p.options_per_cog) + "^" +
                            std::to_string(n_cogs) + " configurations exceeds 2^32",
                        std::pow(2.0, log_space));

    SimWorkflow w;
    Rng rng(derive_seed(p.seed, {0x67726170ULL}));

    // graph
    for (int s = 0; s < p.n_steps; ++s) {
        StepNode n;
        n.id = "step" + std::to_string(s);
        n.kind = static_cast<StepKind>(rng.below(4));
        n.base_cost = rng.uniform(1.0, 3.0);
        n.base_latency = rng.uniform(1.0, 3.0);
        n.iteration_bound = rng.uniform() < p.loop_probability ? 2 : 1;
        n.origin = n.id;
        w.graph.nodes.push_back(n);
    }
    for (int s = 0; s + 1 < p.n_steps; ++s)
        w.graph.edges.emplace_back("step" + std::to_string(s), "step" + std::to_string(s + 1));
    for (int a = 0; a < p.n_steps; ++a)
        for (int b = a + 2; b < p.n_steps; ++b)
            if (rng.uniform() < p.edge_probability)
                w.graph.edges.emplace_back("step" + std::to_string(a), "step" + std::to_string(b));
    for (const auto& n : w.graph.nodes)
        if (n.iteration_bound > 1)
            w.graph.edges.emplace_back(n.id, n.id);
    w.graph.entry = "step0";
    w.graph.exit = "step" + std::to_string(p.n_steps - 1);

    // cogs and effects
    std::vector<Cog> cogs;
    std::set<std::string> arch_targets;
    std::map<std::string, int> cogs_on_step;
    for (int s = 0; s < p.n_steps; ++s)
        for (int j = 0; j < p.cogs_per_step; ++j) {
            const int g = s * p.cogs_per_step + j;
            if (g % 3 != 0)
                ++cogs_on_step["step" + std::to_string(s)];
        }
    for (int s = 0; s < p.n_steps; ++s) {
        const std::string step = "step" + std::to_string(s);
        const StepNode& node = w.graph.nodes[static_cast<std::size_t>(s)];
        for (int j = 0; j < p.cogs_per_step; ++j) {
            const int g = s * p.cogs_per_step + j;
            Cog cog;
            cog.id = "s" + std::to_string(s) + ".c" + std::to_string(j);
            cog.category = g % 3 == 0 ? Category::architecture : g % 3 == 1 ? Category::step : Category::weight;
            SurfaceCog sc;
            sc.id = cog.id;
            sc.category = cog.category;
            Rng crng(derive_seed(p.seed, {0x636f67ULL, static_cast<std::uint64_t>(g)}));
            if (cog.category == Category::architecture) {
                cog.target = arch_targets.insert(step).second ? step : std::string(kGlobalTarget);
                sc.target = cog.target;
                for (int o = 0; o < p.options_per_cog; ++o) {
                    OptionEffect e;
                    e.id = "o" + std::to_string(o);
                    e.base_index = static_cast<std::size_t>(o);
                    if (o == 0) {
                        e.payload = {{"rewrite", "none"}};
                    } else if (cog.target == kGlobalTarget) {
                        e.payload = {{"rewrite", "global"}};
                        e.effect = detail::clip(crng.normal(0.0, p.effect_sd), p.effect_max);
                    } else if (o == 1) {
                        e.payload = {{"rewrite", "decompose"}};
                        for (int i = 0; i < 2; ++i)
                            e.pool.push_back(crng.normal(0.0, p.effect_sd * 0.7));
                        e.effect = detail::clip(e.pool[0] + e.pool[1], p.effect_max);
                    } else {
                        e.payload = {{"rewrite", "ensemble"}, {"k", o}};
                        double best = -std::numeric_limits<double>::infinity();
                        for (int i = 0; i < o; ++i) {
                            e.pool.push_back(crng.normal(0.0, p.effect_sd * 0.7));
                            best = std::max(best, e.pool.back());
                        }
                        e.effect = detail::clip(best - p.aggregation_penalty, p.effect_max);
                    }
                    cog.options.push_back({e.id, e.payload, Provenance::static_option});
                    sc.options.push_back(std::move(e));
                }
            } else {
                cog.target = step;
                sc.target = step;
                cog.dynamic = p.dynamic_weights && cog.category == Category::weight;
                const double share = 1.0 / static_cast<double>(std::max(1, cogs_on_step[step]));
                for (int o = 0; o < p.options_per_cog; ++o) {
                    OptionEffect e;
                    e.id = "o" + std::to_string(o);
                    e.base_index = static_cast<std::size_t>(o);
                    e.effect = detail::clip(crng.normal(0.0, p.effect_sd), p.effect_max);
                    const double z = p.effect_sd > 0.0 ? e.effect / p.effect_sd : 0.0;
                    e.cost_delta =
                        node.base_cost * share * std::max(-0.9, p.cost_coupling * z + 0.25 * crng.normal());
                    e.latency_delta =
                        node.base_latency * share * std::max(-0.9, 0.5 * p.cost_coupling * z + 0.25 * crng.normal());
                    cog.options.push_back({e.id, json::object(), Provenance::static_option});
                    sc.options.push_back(std::move(e));
                }
            }
            cogs.push_back(std::move(cog));
            w.surface.cogs.push_back(std::move(sc));
        }
    }
    w.catalog = CogCatalog(std::move(cogs), 0);
    w.surface.params = p;

    // interactions: floor(density * C(n, 2)) distinct pairs
    const std::size_t n = w.surface.cogs.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            pairs.emplace_back(a, b);
    const auto n_pairs = static_cast<std::size_t>(std::floor(p.interaction_density * static_cast<double>(pairs.size()) + 1e-9));
    Rng irng(derive_seed(p.seed, {0x696e74ULL}));
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const auto j = i + static_cast<std::size_t>(irng.below(pairs.size() - i));
        std::swap(pairs[i], pairs[j]);
        Interaction it;
        it.a = pairs[i].first;
        it.b = pairs[i].second;
        const auto ma = w.surface.cogs[it.a].options.size(), mb = w.surface.cogs[it.b].options.size();
        it.table.assign(ma, std::vector<double>(mb, 0.0));
        for (auto& row : it.table)
            for (auto& v : row)
                v = irng.normal(0.0, p.interaction_sd);
        w.surface.interactions.push_back(std::move(it));
    }
    std::sort(w.surface.interactions.begin(), w.surface.interactions.end(),
              [](const Interaction& x, const Interaction& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

    w.graph.validate();

    const std::uint64_t size = space_size(w.catalog);
    if (size <= kMaxOracleSpace) {
        double best = -std::numeric_limits<double>::infinity();
        std::uint64_t best_index = 0;
        for (std::uint64_t i = 0; i < size; ++i) {
            const double z = latent_logit(w.surface, configuration_at(w.catalog, i));
            if (z > best) {
                best = z;
                best_index = i;
            }
        }
        w.surface.optimum_key = canonical_key(configuration_at(w.catalog, best_index));
        w.surface.optimum_quality = logistic(best);
    }
    return w;
}

inline SimWorkflow generate_surface(std::uint64_t seed, int n_steps, int cogs_per_step, int options_per_cog,
                                    double interaction_density)
{
    SurfaceParams p;
    p.seed = seed;
    p.n_steps = n_steps;
    p.cogs_per_step = cogs_per_step;
    p.options_per_cog = options_per_cog;
    p.interaction_density = interaction_density;
    return generate_surface(p);
}

// --- evolved options ------------------------------------------------------------------

/// Registers surface entries for evolved catalog options that the surface
/// does not know yet. Effects come from the option payload; cost, latency and
/// interaction row are inherited from the source option.
inline void register_evolved(LatentSurface& surface, const CogCatalog& catalog)
{
    for (auto& sc : surface.cogs) {
        const Cog* cog = catalog.find(sc.id);
        if (cog == nullptr)
            continue;
        for (const auto& o : cog->options) {
            if (o.provenance != Provenance::evolved || sc.find(o.id) != nullptr)
                continue;
            const auto src_id = o.payload.at("evolved_from").get<std::string>();
            const OptionEffect* src = sc.find(src_id);
            if (src == nullptr)
                throw SchemaError("evolved option '" + o.id + "' names unknown source '" + src_id + "'");
            OptionEffect e = *src;
            e.id = o.id;
            e.effect = o.payload.at("effect").get<double>();
            e.payload = o.payload;
            e.pool.clear();
            sc.options.push_back(std::move(e));
        }
    }
}

/// Derives up to k options for a dynamic cog from the k best archived
/// observations (by scalar score). Each new option perturbs the effect its
/// source realized for the cog, capped strictly below effect_max. Options
/// already present are skipped, so a repeated call on the same archive
/// appends nothing.
inline std::vector<OptionRef> evolve_dynamic_options(CogCatalog& catalog, const ResultArchive& archive,
                                                     const std::string& cog_id, std::size_t k,
                                                     LatentSurface& surface, const EvaluatorSpec& spec = {})
{
    const Cog& cog = catalog.at(cog_id);
    if (!cog.dynamic)
        throw ContractError("cog '" + cog_id + "' is not dynamic");
    if (k == 0 || archive.empty())
        return {};
    const SurfaceCog* sc = surface.find(cog_id);
    if (sc == nullptr)
        throw ArgumentError("surface has no cog '" + cog_id + "'");

    std::vector<const Observation*> ranked;
    for (const auto& o : archive.observations())
        if (o.feasible && !o.failed && !o.cached && o.config.find(cog_id) != nullptr)
            ranked.push_back(&o);
    std::stable_sort(ranked.begin(), ranked.end(), [&](const Observation* a, const Observation* b) {
        return raw_score(a->metrics, spec) > raw_score(b->metrics, spec);
    });
    if (ranked.size() > k)
        ranked.resize(k);

    const double cap = std::nextafter(surface.params.effect_max, 0.0);
    std::vector<OptionRef> fresh;
    for (const auto* o : ranked) {
        const std::string& src = *o->config.find(cog_id);
        const std::string id = src + "+e" + std::to_string(o->eval_index);
        if (cog.option_index(id).has_value())
            continue;
        const OptionEffect* src_effect = sc->find(src);
        if (src_effect == nullptr)
            continue;
        Rng rng(derive_seed(surface.params.seed,
                            {0x65766fULL, hash_string(cog_id), static_cast<std::uint64_t>(o->eval_index)}));
        const double effect =
            std::min(cap, src_effect->effect + std::abs(rng.normal(0.0, 0.25 * surface.params.effect_sd)));
        fresh.push_back({id,
                         {{"evolved_from", src}, {"effect", effect}, {"source_eval", o->eval_index}},
                         Provenance::evolved});
    }
    catalog.append_options(cog_id, fresh);
    register_evolved(surface, catalog);
    return fresh;
}

// --- evaluators -----------------------------------------------------------------------

class SimEvaluator final : public Evaluator {
public:
    explicit SimEvaluator(const SimWorkflow& w, std::size_t evolve_k = 0) : graph_(w.graph), surface_(w.surface),
                                                                            evolve_k_(evolve_k)
    {
    }
    SimEvaluator(WorkflowGraph g, LatentSurface s, std::size_t evolve_k = 0)
        : graph_(std::move(g)), surface_(std::move(s)), evolve_k_(evolve_k)
    {
    }

    MetricVector evaluate(const Configuration& config, std::uint64_t nonce) const override
    {
        return sim_evaluate(graph_, surface_, config, nonce);
    }

    void on_chunk_boundary(CogCatalog& catalog, const ResultArchive& archive) override
    {
        if (evolve_k_ == 0)
            return;
        for (const auto& id : catalog.ids())
            if (catalog.at(id).dynamic)
                evolve_dynamic_options(catalog, archive, id, evolve_k_, surface_, spec_);
    }

    void sync(const CogCatalog& catalog) override { register_evolved(surface_, catalog); }

    void set_spec(EvaluatorSpec spec) { spec_ = std::move(spec); }

    const WorkflowGraph& graph() const { return graph_; }
    const LatentSurface& surface() const { return surface_; }

private:
    WorkflowGraph graph_;
    LatentSurface surface_;
    std::size_t evolve_k_;
    EvaluatorSpec spec_;
};

/// Every configuration evaluated once, noise off, in index order.
struct OracleResult {
    ResultArchive archive;
    std::vector<Observation> frontier;
};

inline OracleResult brute_force_oracle(const WorkflowGraph& graph, const LatentSurface& surface,
                                       const CogCatalog& catalog, const EvaluatorSpec& spec = {})
{
    const std::uint64_t size = space_size(catalog);
    if (size > kMaxOracleSpace)
        throw SizeError("brute_force_oracle: space of " + std::to_string(size) + " configurations exceeds 2^20",
                        static_cast<double>(size));
    LatentSurface quiet = surface;
    quiet.params.noise_sd = 0.0;
    OracleResult out;
    for (std::uint64_t i = 0; i < size; ++i) {
        Observation o;
        o.config = catalog.stamp(configuration_at(catalog, i));
        o.metrics = sim_evaluate(graph, quiet, o.config);
        o.feasible = feasible(o.metrics, spec);
        out.archive.append(std::move(o));
    }
    out.frontier = pareto_frontier(out.archive, spec);
    return out;
}

// --- probes -------------------------------------------------------------------------

struct ProbeReport {
    std::map<std::string, double> importance;  // per step
    std::vector<std::string> importance_selected;
    std::map<std::string, double> complexity;  // per step
    std::vector<std::string> complexity_selected;
    std::map<std::string, std::string> best_option; // per probed cog, best probe score
    std::int64_t probe_evals = 0;

    json to_json() const
    {
        return {{"importance", importance},
                {"importance_selected", importance_selected},
                {"complexity", complexity},
                {"complexity_selected", complexity_selected},
                {"best_option", best_option},
                {"probe_evals", probe_evals}};
    }
};

/// Seeded stand-in for an external complexity judge: integer ratings 1..10.
inline std::map<std::string, double> default_ratings(const WorkflowGraph& graph, std::uint64_t seed)
{
    std::map<std::string, double> out;
    for (const auto& n : graph.nodes) {
        Rng rng(derive_seed(seed, {0x72617465ULL, hash_string(n.id)}));
        out[n.id] = static_cast<double>(1 + rng.below(10));
    }
    return out;
}

inline double median_of(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct ComplexityResult {
    std::map<std::string, double> scores;
    std::vector<std::string> selected; // graph node order
    double threshold = 0.0;
};

/// score = rating x out-degree; nodes strictly above the threshold (default:
/// median score) are selected.
inline ComplexityResult complexity_scores(const WorkflowGraph& graph, const std::map<std::string, double>& ratings,
                                          std::optional<double> threshold = std::nullopt)
{
    ComplexityResult out;
    std::vector<double> all;
    for (const auto& n : graph.nodes) {
        auto it = ratings.find(n.id);
        if (it == ratings.end())
            throw ArgumentError("no rating for node '" + n.id + "'");
        const double s = it->second * static_cast<double>(graph.out_degree(n.id));
        out.scores[n.id] = s;
        all.push_back(s);
    }
    out.threshold = threshold.value_or(median_of(all));
    for (const auto& n : graph.nodes)
        if (out.scores[n.id] > out.threshold)
            out.selected.push_back(n.id);
    return out;
}

/// Cheapest option per cog: the identity rewrite for architecture cogs, the
/// smallest cost delta otherwise (first on ties).
inline std::map<std::string, std::string> cheapest_options(const LatentSurface& surface)
{
    std::map<std::string, std::string> out;
    for (const auto& c : surface.cogs) {
        const OptionEffect* best = &c.options.front();
        if (c.category != Category::architecture)
            for (const auto& o : c.options)
                if (o.cost_delta < best->cost_delta)
                    best = &o;
        out[c.id] = best->id;
    }
    return out;
}

using ScoreFn = std::function<double(const Configuration&)>;

/// For each step with step-category cogs: score every option of each such cog
/// with all other cogs frozen at their cheapest option. A step's importance
/// is the best-minus-worst spread, maximized over its step cogs. The top
/// ceil(K% of steps) are selected.
inline ProbeReport step_importance(const CogCatalog& catalog, const std::map<std::string, std::string>& cheapest,
                                   double top_percent, const ScoreFn& score)
{
    if (!(top_percent >= 0.0 && top_percent <= 100.0))
        throw ArgumentError("top_percent must be in [0, 100]");
    Configuration base;
    base.catalog_version = catalog.version();
    for (const auto& c : catalog.cogs()) {
        auto it = cheapest.find(c.id);
        base.assignments[c.id] = it != cheapest.end() ? it->second : c.options.front().id;
    }
    ProbeReport report;
    std::vector<std::string> steps;
    for (const auto& c : catalog.cogs()) {
        if (c.category != Category::step)
            continue;
        if (cheapest.find(c.id) == cheapest.end())
            throw ArgumentError("step cog '" + c.id + "' has no cheapest option");
        double best = -std::numeric_limits<double>::infinity(), worst = std::numeric_limits<double>::infinity();
        std::string best_id;
        for (const auto& o : c.options) {
            Configuration probe = base;
            probe.assignments[c.id] = o.id;
            const double s = score(probe);
            ++report.probe_evals;
            if (s > best) {
                best = s;
                best_id = o.id;
            }
            worst = std::min(worst, s);
        }
        report.best_option[c.id] = best_id;
        const double spread = best - worst;
        auto [it, inserted] = report.importance.try_emplace(c.target, spread);
        if (inserted)
            steps.push_back(c.target);
        else
            it->second = std::max(it->second, spread);
    }
    std::vector<std::string> ranked = steps;
    std::stable_sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
        return report.importance[a] > report.importance[b];
    });
    const auto keep = static_cast<std::size_t>(std::ceil(top_percent / 100.0 * static_cast<double>(steps.size()) - 1e-9));
    ranked.resize(std::min(ranked.size(), keep));
    report.importance_selected = ranked;
    return report;
}

/// Probe count step_importance would spend.
inline std::int64_t step_importance_cost(const CogCatalog& catalog)
{
    std::int64_t n = 0;
    for (const auto& c : catalog.cogs())
        if (c.category == Category::step)
            n += static_cast<std::int64_t>(c.options.size());
    return n;
}

inline ProbeReport step_importance(const WorkflowGraph& graph, const LatentSurface& surface,
                                   const CogCatalog& catalog, const std::map<std::string, std::string>& cheapest,
                                   double top_percent, const EvaluatorSpec& spec = {})
{
    return step_importance(catalog, cheapest, top_percent, [&](const Configuration& c) {
        return scalar_score(sim_evaluate(graph, surface, c), spec);
    });
}

// --- pre-filters for the driver ---------------------------------------------------

/// Step cogs on unimportant steps are fixed to the option that probed best.
/// Skipped when the probes would not fit the remaining budget.
inline Prefilter importance_prefilter(std::map<std::string, std::string> cheapest, double top_percent = 50.0)
{
    return {"step_importance",
            [cheapest = std::move(cheapest), top_percent](const CogCatalog& catalog, const Evaluator& evaluator,
                                                          const EvaluatorSpec& spec, std::int64_t left) {
                PrefilterResult res;
                const std::int64_t cost = step_importance_cost(catalog);
                if (cost > left) {
                    res.report = {{"skipped", "probes exceed remaining budget"}, {"probe_cost", cost}};
                    return res;
                }
                std::uint64_t nonce = 0;
                const ProbeReport report = step_importance(catalog, cheapest, top_percent, [&](const Configuration& c) {
                    const MetricVector m = evaluator.evaluate(c, derive_seed(0x70726f6265ULL, {nonce++}));
                    return scalar_score(m, spec);
                });
                const std::set<std::string> keep(report.importance_selected.begin(), report.importance_selected.end());
                for (const auto& c : catalog.cogs())
                    if (c.category == Category::step && keep.count(c.target) == 0)
                        res.frozen.assignments[c.id] = report.best_option.at(c.id);
                res.probe_evals = report.probe_evals;
                res.report = report.to_json();
                return res;
            }};
}

/// Architecture cogs on steps below the complexity threshold keep the
/// identity rewrite.
inline Prefilter complexity_prefilter(const WorkflowGraph& graph, std::map<std::string, double> ratings)
{
    return {"complexity",
            [graph, ratings = std::move(ratings)](const CogCatalog& catalog, const Evaluator&, const EvaluatorSpec&,
                                                  std::int64_t) {
                PrefilterResult res;
                const auto cs = complexity_scores(graph, ratings);
                const std::set<std::string> keep(cs.selected.begin(), cs.selected.end());
                for (const auto& c : catalog.cogs())
                    if (c.category == Category::architecture && c.target != kGlobalTarget &&
                        keep.count(c.target) == 0)
                        res.frozen.assignments[c.id] = c.options.front().id;
                res.report = {{"scores", cs.scores}, {"selected", cs.selected}, {"threshold", cs.threshold}};
                return res;
            }};
}

} // namespace adaseek

#endif
