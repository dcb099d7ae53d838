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

#ifndef ADASEEK_DRIVER_HPP
#define ADASEEK_DRIVER_HPP

// Top-level round loop. Rounds run with L = 1, 2, 3 layers. Each round
// estimates the size of every layer as (#cogs)^alpha, asks for E_L = prod S_i
// evaluations (clamped to what is left; the last round takes everything) and
// splits the grant into per-layer budgets whose product stays within it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cogspace.hpp"
#include "evaluator.hpp"
#include "objectives.hpp"
#include "persist.hpp"
#include "search.hpp"

namespace adaseek {

inline constexpr int kManifestFormatVersion = 1;

struct DriverKnobs {
    double alpha = 1.1;
    SearchKnobs search;
    bool paper_exact_sqrt = false; // square root instead of the L-th root in the partition
    int forced_layers = 0;         // 0 = rounds 1, 2, 3; otherwise one round with this L
    std::size_t select_k = 4;
};

inline json knobs_to_json(const DriverKnobs& k)
{
    return {{"alpha", k.alpha},
            {"eta", k.search.eta},
            {"chunk_size", k.search.chunk_size},
            {"gamma", k.search.tpe.gamma},
            {"smoothing", k.search.tpe.smoothing},
            {"n_candidates", k.search.tpe.n_candidates},
            {"early_stop", k.search.early_stop},
            {"es_window", k.search.es_window},
            {"es_epsilon", k.search.es_epsilon},
            {"dedup", k.search.dedup},
            {"parallel", k.search.parallel},
            {"surrogate_trace", k.search.surrogate_trace},
            {"paper_exact_sqrt", k.paper_exact_sqrt},
            {"forced_layers", k.forced_layers},
            {"select_k", k.select_k}};
}

inline DriverKnobs knobs_from_json(const json& j)
{
    DriverKnobs k;
    k.alpha = j.value("alpha", k.alpha);
    k.search.eta = j.value("eta", k.search.eta);
    k.search.chunk_size = j.value("chunk_size", k.search.chunk_size);
    k.search.tpe.gamma = j.value("gamma", k.search.tpe.gamma);
    k.search.tpe.smoothing = j.value("smoothing", k.search.tpe.smoothing);
    k.search.tpe.n_candidates = j.value("n_candidates", k.search.tpe.n_candidates);
    k.search.early_stop = j.value("early_stop", k.search.early_stop);
    k.search.es_window = j.value("es_window", k.search.es_window);
    k.search.es_epsilon = j.value("es_epsilon", k.search.es_epsilon);
    k.search.dedup = j.value("dedup", k.search.dedup);
    k.search.parallel = j.value("parallel", k.search.parallel);
    k.search.surrogate_trace = j.value("surrogate_trace", k.search.surrogate_trace);
    k.paper_exact_sqrt = j.value("paper_exact_sqrt", k.paper_exact_sqrt);
    k.forced_layers = j.value("forced_layers", k.forced_layers);
    k.select_k = j.value("select_k", k.select_k);
    return k;
}

inline void validate_knobs(const DriverKnobs& k)
{
    if (!(k.alpha > 0.0))
        throw ArgumentError("alpha must be > 0");
    if (k.search.eta < 2)
        throw ArgumentError("eta must be >= 2");
    if (k.search.chunk_size < 1)
        throw ArgumentError("chunk size must be >= 1");
    if (!(k.search.tpe.gamma > 0.0 && k.search.tpe.gamma <= 1.0))
        throw ArgumentError("gamma must be in (0, 1]");
    if (!(k.search.tpe.smoothing > 0.0))
        throw ArgumentError("smoothing must be > 0");
    if (k.search.tpe.n_candidates < 1)
        throw ArgumentError("n_candidates must be >= 1");
    if (k.search.es_window < 1)
        throw ArgumentError("early-stop window must be >= 1");
    if (k.search.parallel < 1)
        throw ArgumentError("parallel must be >= 1");
    if (k.forced_layers < 0 || k.forced_layers > 3)
        throw ArgumentError("forced layer count must be auto, 1, 2 or 3");
    if (k.select_k < 1)
        throw ArgumentError("select_k must be >= 1");
}

// --- budget planning -----------------------------------------------------------------

/// S_i = (#cogs in layer i)^alpha; an empty layer counts as 1.
inline std::vector<double> estimate_sizes(const LayerPlan& plan, double alpha)
{
    if (!(alpha > 0.0))
        throw ArgumentError("estimate_sizes: alpha must be > 0");
    std::vector<double> sizes;
    for (const auto& layer : plan.layers)
        sizes.push_back(layer.empty() ? 1.0 : std::pow(static_cast<double>(layer.size()), alpha));
    return sizes;
}

inline double expected_evaluations(std::span<const double> sizes)
{
    double e = 1.0;
    for (double s : sizes)
        e *= s;
    return e;
}

/// Evaluations granted to a round with L layers.
inline std::int64_t round_budget(std::int64_t total, std::int64_t used, double expected, int L)
{
    if (used > total)
        throw ArgumentError("round_budget: used budget exceeds total");
    const std::int64_t left = total - used;
    if (L >= 3)
        return left;
    const auto want = static_cast<std::int64_t>(std::ceil(expected - 1e-9));
    return std::min(left, want);
}

/// B_i = max(1, floor(S_i * (E/E_L)^(1/L))) for non-empty layers, 1 for empty
/// ones. `exact_sqrt` uses the square root for every L.
inline std::vector<std::int64_t> partition_budget(std::span<const double> sizes, std::int64_t granted,
                                                  double expected, int L, const std::vector<bool>& empty_layers = {},
                                                  bool exact_sqrt = false)
{
    if (granted < 0)
        throw ArgumentError("partition_budget: E must be >= 0");
    const double ratio = expected > 0.0 ? static_cast<double>(granted) / expected : 0.0;
    const double scale = exact_sqrt ? std::sqrt(ratio) : std::pow(ratio, 1.0 / static_cast<double>(L));
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i < empty_layers.size() && empty_layers[i]) {
            out.push_back(1);
            continue;
        }
        // The epsilon absorbs products like 6.6 * (5 / 6.6) landing just
        // under an integer.
        const auto b = static_cast<std::int64_t>(std::floor(sizes[i] * scale + 1e-9));
        out.push_back(std::max<std::int64_t>(1, b));
    }
    return out;
}

inline std::int64_t budget_product(std::span<const std::int64_t> budgets)
{
    std::int64_t p = 1;
    for (auto b : budgets)
        p *= b;
    return p;
}

/// Lowers the largest budget (outermost on ties) until the product fits the
/// grant. Needed after the max(1, .) floor and for the square-root rule.
inline void fit_budgets_to_grant(std::vector<std::int64_t>& budgets, std::int64_t granted)
{
    while (budget_product(budgets) > std::max<std::int64_t>(1, granted)) {
        std::size_t pick = budgets.size();
        for (std::size_t i = budgets.size(); i-- > 0;)
            if (budgets[i] > 1 && (pick == budgets.size() || budgets[i] > budgets[pick]))
                pick = i;
        if (pick == budgets.size())
            break;
        --budgets[pick];
    }
}

struct RoundPlan {
    int L = 1;
    LayerPlan layer_plan;
    std::vector<double> sizes;
    double expected = 1.0; // E_L
    std::int64_t granted = 0; // E
    std::vector<std::int64_t> budgets;
};

/// Layer plan for L without the cogs fixed in `frozen`.
inline LayerPlan search_layers(const CogCatalog& catalog, int L, const Configuration& frozen)
{
    LayerPlan plan = group_layers(catalog, L);
    for (auto& layer : plan.layers)
        std::erase_if(layer, [&](const std::string& id) { return frozen.find(id) != nullptr; });
    return plan;
}

inline RoundPlan plan_round(const CogCatalog& catalog, const Configuration& frozen, int L, std::int64_t total,
                            std::int64_t used, const DriverKnobs& knobs)
{
    RoundPlan plan;
    plan.L = L;
    plan.layer_plan = search_layers(catalog, L, frozen);
    plan.sizes = estimate_sizes(plan.layer_plan, knobs.alpha);
    plan.expected = expected_evaluations(plan.sizes);
    plan.granted = knobs.forced_layers != 0 ? total - used : round_budget(total, used, plan.expected, L);
    std::vector<bool> empty;
    for (const auto& layer : plan.layer_plan.layers)
        empty.push_back(layer.empty());
    plan.budgets = partition_budget(plan.sizes, plan.granted, plan.expected, L, empty, knobs.paper_exact_sqrt);
    fit_budgets_to_grant(plan.budgets, plan.granted);
    plan.layer_plan.sizes = plan.sizes;
    plan.layer_plan.budgets = plan.budgets;
    return plan;
}

// --- ledger ------------------------------------------------------------------------

struct RoundEntry {
    int L = 1;
    int session = 0;
    std::int64_t granted = 0;
    double expected = 0.0;
    std::vector<double> sizes;
    std::vector<std::int64_t> budgets;
    std::vector<std::vector<std::string>> layers;
    std::int64_t archive_start = 0;
    std::int64_t consumed = 0;
    std::vector<std::int64_t> proposals; // per layer, innermost first
    bool complete = false;
    bool interrupted = false;
    bool converged = false;

    json to_json() const
    {
        return {{"L", L},
                {"session", session},
                {"E", granted},
                {"E_L", expected},
                {"sizes", sizes},
                {"budgets", budgets},
                {"layers", layers},
                {"archive_start", archive_start},
                {"consumed", consumed},
                {"proposals", proposals},
                {"complete", complete},
                {"interrupted", interrupted},
                {"converged", converged}};
    }

    static RoundEntry from_json(const json& j)
    {
        RoundEntry r;
        r.L = j.at("L").get<int>();
        r.session = j.value("session", 0);
        r.granted = j.at("E").get<std::int64_t>();
        r.expected = j.at("E_L").get<double>();
        r.sizes = j.at("sizes").get<std::vector<double>>();
        r.budgets = j.at("budgets").get<std::vector<std::int64_t>>();
        r.layers = j.value("layers", std::vector<std::vector<std::string>>{});
        r.archive_start = j.value("archive_start", std::int64_t{0});
        r.consumed = j.at("consumed").get<std::int64_t>();
        r.proposals = j.value("proposals", std::vector<std::int64_t>{});
        r.complete = j.at("complete").get<bool>();
        r.interrupted = j.value("interrupted", false);
        r.converged = j.value("converged", false);
        return r;
    }
};

struct BudgetLedger {
    std::int64_t total = 0;
    std::int64_t used = 0;
    std::int64_t probe_evals = 0;
    std::vector<RoundEntry> rounds;

    json to_json() const
    {
        json r = json::array();
        for (const auto& e : rounds)
            r.push_back(e.to_json());
        return {{"total", total}, {"used", used}, {"probe_evals", probe_evals}, {"rounds", r}};
    }

    static BudgetLedger from_json(const json& j)
    {
        BudgetLedger l;
        l.total = j.at("total").get<std::int64_t>();
        l.used = j.at("used").get<std::int64_t>();
        l.probe_evals = j.value("probe_evals", std::int64_t{0});
        for (const auto& r : j.at("rounds"))
            l.rounds.push_back(RoundEntry::from_json(r));
        return l;
    }
};

// --- pre-filters --------------------------------------------------------------------

/// Cogs a pre-filter removes from the search, with the options they are fixed
/// to. Probe evaluations are charged to the budget but not archived.
struct PrefilterResult {
    Configuration frozen;
    std::int64_t probe_evals = 0;
    json report;
};

struct Prefilter {
    std::string name;
    /// Receives the budget still available; must not spend more.
    std::function<PrefilterResult(const CogCatalog&, const Evaluator&, const EvaluatorSpec&, std::int64_t)> run;
};

// --- run -----------------------------------------------------------------------------

struct RunOutcome {
    std::vector<Observation> selected;
    std::int64_t new_evaluations = 0;
    bool noop = false;
};

class AdaSeekRun {
public:
    AdaSeekRun(CogCatalog catalog, Evaluator& evaluator, EvaluatorSpec spec, DriverKnobs knobs, std::uint64_t seed)
        : catalog_(std::move(catalog)), evaluator_(&evaluator), spec_(std::move(spec)), knobs_(knobs), seed_(seed)
    {
        spec_.validate();
        validate_knobs(knobs_);
    }

    /// Persists into `dir` (created if missing) from now on.
    void attach(const fs::path& dir)
    {
        fs::create_directories(dir);
        paths_ = RunPaths{dir};
        if (!fs::exists(paths_->archive()))
            write_archive(paths_->archive(), archive_);
        writer_.emplace(paths_->archive(), archive_.size());
    }

    void add_prefilter(Prefilter p) { prefilters_.push_back(std::move(p)); }

    /// Opaque description of the evaluator, stored in the manifest.
    void set_source(json source) { source_ = std::move(source); }

    /// Reloads a persisted run. The evaluator is synced to the stored catalog.
    static AdaSeekRun load(const fs::path& dir, Evaluator& evaluator)
    {
        const RunPaths paths{dir};
        const json m = read_json(paths.manifest());
        if (!m.contains("format_version") || m["format_version"] != kManifestFormatVersion)
            throw SchemaError("manifest: unsupported format_version");
        const CogCatalog loaded = build_catalog(m.at("catalog"));
        CogCatalog catalog(loaded.cogs(), m.at("catalog_version").get<std::int64_t>());
        AdaSeekRun run(std::move(catalog), evaluator, spec_from_json(m.at("evaluator")),
                       knobs_from_json(m.at("knobs")), m.at("seed").get<std::uint64_t>());
        run.archive_ = read_archive(paths.archive());
        run.ledger_ = BudgetLedger::from_json(m.at("ledger"));
        run.chunk_counter_ = m.value("chunk_counter", std::int64_t{0});
        for (const auto& o : run.archive_.observations())
            run.chunk_counter_ = std::max(run.chunk_counter_, o.chunk_id + 1);
        run.session_ = m.value("session", 0);
        run.frozen_ = configuration_from_json(m.value("frozen", json::object()));
        run.prefilter_done_ = m.value("prefilter_done", false);
        run.prefilter_report_ = m.value("prefilter_report", json::object());
        run.source_ = m.value("source", json());
        for (auto& r : run.ledger_.rounds) {
            if (!r.complete) {
                r.interrupted = true;
                r.consumed = static_cast<std::int64_t>(run.archive_.size()) - r.archive_start;
            }
        }
        run.ledger_.used = run.used();
        evaluator.sync(run.catalog_);
        run.paths_ = paths;
        run.writer_.emplace(paths.archive(), run.archive_.size());
        return run;
    }

    RunOutcome run(std::int64_t total)
    {
        if (total < 1)
            throw ArgumentError("budget must be >= 1");
        RunOutcome out;
        const std::size_t start = archive_.size();
        const std::int64_t previous_total = ledger_.total;
        if (previous_total > 0 && total <= used()) {
            out.noop = true;
            out.selected = selected();
            return out;
        }
        ledger_.total = total;
        status_ = "running";
        persist();

        if (!prefilter_done_) {
            run_prefilters();
            prefilter_done_ = true;
            persist();
        }
        for (int L : pending_rounds(previous_total, total)) {
            if (used() >= total)
                break;
            run_round(L);
        }
        status_ = "complete";
        persist();
        if (paths_) {
            write_text(paths_->frontier(), frontier_csv(pareto_frontier(archive_, spec_)));
            write_text(paths_->summary(), summary());
        }
        out.selected = selected();
        out.new_evaluations = static_cast<std::int64_t>(archive_.size() - start);
        return out;
    }

    std::vector<Observation> selected() const
    {
        if (archive_.empty())
            return {};
        return select_best(archive_, spec_, knobs_.select_k);
    }

    std::int64_t used() const { return static_cast<std::int64_t>(archive_.size()) + ledger_.probe_evals; }

    const ResultArchive& archive() const { return archive_; }
    const BudgetLedger& ledger() const { return ledger_; }
    const CogCatalog& catalog() const { return catalog_; }
    const EvaluatorSpec& spec() const { return spec_; }
    const DriverKnobs& knobs() const { return knobs_; }
    const std::vector<ChunkRecord>& chunks() const { return chunks_; }
    const Configuration& frozen() const { return frozen_; }
    std::uint64_t seed() const { return seed_; }

    json manifest() const
    {
        return {{"format_version", kManifestFormatVersion},
                {"seed", seed_},
                {"catalog", catalog_to_json(catalog_)},
                {"catalog_version", catalog_.version()},
                {"evaluator", spec_to_json(spec_)},
                {"knobs", knobs_to_json(knobs_)},
                {"ledger", ledger_.to_json()},
                {"chunk_counter", chunk_counter_},
                {"session", session_},
                {"frozen", configuration_to_json(frozen_)},
                {"prefilter_done", prefilter_done_},
                {"prefilter_report", prefilter_report_},
                {"archive_lines", archive_.size()},
                {"status", status_},
                {"source", source_}};
    }

    std::string summary() const
    {
        std::ostringstream s;
        s << "evaluations " << archive_.size() << " / budget " << ledger_.total;
        if (ledger_.probe_evals > 0)
            s << " (" << ledger_.probe_evals << " probes)";
        s << "\n";
        for (const auto& r : ledger_.rounds) {
            s << "round L=" << r.L << " E=" << r.granted << " B=(";
            for (std::size_t i = 0; i < r.budgets.size(); ++i)
                s << (i ? "," : "") << r.budgets[i];
            s << ") consumed=" << r.consumed << (r.converged ? " early-stopped" : "")
              << (r.interrupted ? " interrupted" : "") << "\n";
        }
        const auto sel = selected();
        s << "selected " << sel.size() << "\n";
        for (Metric m : spec_.objectives) {
            s << "best by " << to_string(m) << ":\n";
            auto ranked = sel;
            std::stable_sort(ranked.begin(), ranked.end(), [&](const Observation& a, const Observation& b) {
                return detail::better_along(m, a.metrics.get(m), b.metrics.get(m));
            });
            for (const auto& o : ranked)
                s << "  #" << o.eval_index << " quality=" << format_double(o.metrics.quality)
                  << " cost=" << format_double(o.metrics.cost) << " latency=" << format_double(o.metrics.latency)
                  << "  " << o.key() << "\n";
        }
        return s.str();
    }

private:
    std::vector<int> pending_rounds(std::int64_t previous_total, std::int64_t total)
    {
        const std::vector<int> sequence =
            knobs_.forced_layers != 0 ? std::vector<int>{knobs_.forced_layers} : std::vector<int>{1, 2, 3};
        std::set<int> done;
        for (const auto& r : ledger_.rounds)
            if (r.complete)
                done.insert(r.L);
        std::vector<int> todo;
        for (int L : sequence)
            if (done.count(L) == 0)
                todo.push_back(L);
        if (todo.empty() && previous_total > 0 && total > previous_total) {
            // Every round already ran; more budget continues at the deepest
            // layering.
            ++session_;
            todo.push_back(sequence.back());
        }
        return todo;
    }

    void run_prefilters()
    {
        for (const auto& p : prefilters_) {
            const std::int64_t left = ledger_.total - used();
            PrefilterResult res = p.run(catalog_, *evaluator_, spec_, left);
            if (res.probe_evals > left)
                throw ContractError("pre-filter '" + p.name + "' overspent the budget");
            ledger_.probe_evals += res.probe_evals;
            frozen_ = merge(frozen_, res.frozen);
            prefilter_report_[p.name] = res.report;
        }
        ledger_.used = used();
    }

    /// Automatic scalarization with both cost and latency divides each by its
    /// archive median so neither unit dominates.
    EvaluatorSpec round_spec() const
    {
        EvaluatorSpec s = spec_;
        s.cost_scale = 1.0;
        s.latency_scale = 1.0;
        if (s.scalarizer != Scalarizer::automatic || !s.has(Metric::cost) || !s.has(Metric::latency) ||
            archive_.empty())
            return s;
        auto median = [&](Metric m) {
            std::vector<double> v;
            for (const auto& o : archive_.observations())
                if (!o.failed)
                    v.push_back(o.metrics.get(m));
            if (v.empty())
                return 1.0;
            std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
            const double med = v[v.size() / 2];
            return med > 0.0 ? med : 1.0;
        };
        s.cost_scale = median(Metric::cost);
        s.latency_scale = median(Metric::latency);
        return s;
    }

    void run_round(int L)
    {
        const RoundPlan plan = plan_round(catalog_, frozen_, L, ledger_.total, used(), knobs_);
        if (plan.granted <= 0)
            return;
        const std::size_t round_index = ledger_.rounds.size();
        RoundEntry entry;
        entry.L = L;
        entry.session = session_;
        entry.granted = plan.granted;
        entry.expected = plan.expected;
        entry.sizes = plan.sizes;
        entry.budgets = plan.budgets;
        entry.layers = plan.layer_plan.layers;
        entry.archive_start = static_cast<std::int64_t>(archive_.size());
        ledger_.rounds.push_back(entry);
        persist();

        const std::uint64_t round_seed =
            derive_seed(seed_, {3, static_cast<std::uint64_t>(round_index), static_cast<std::uint64_t>(L)});
        SearchContext ctx;
        ctx.catalog = &catalog_;
        ctx.evaluator = evaluator_;
        ctx.spec = round_spec();
        ctx.knobs = knobs_.search;
        ctx.layers = plan.layer_plan.layers;
        ctx.budgets = plan.budgets;
        ctx.round_L = L;
        ctx.seed = round_seed;
        ctx.chunk_counter = &chunk_counter_;
        ctx.on_chunk_end = [this] {
            evaluator_->on_chunk_boundary(catalog_, archive_);
            persist();
        };
        LayerSearch search(ctx);
        ArchiveView view(archive_);
        SearchRecord rec;
        const SearchResult res = search.run(view, rec, frozen_, L, plan.budgets.back(), round_seed, true, 0,
                                            "r" + std::to_string(round_index));

        RoundEntry& done = ledger_.rounds.back();
        done.consumed = static_cast<std::int64_t>(archive_.size()) - done.archive_start;
        done.proposals = rec.proposals;
        done.complete = true;
        done.converged = res.converged;
        ledger_.used = used();
        if (used() > ledger_.total)
            throw ContractError("round overspent the budget");

        if (paths_) {
            std::vector<json> trace;
            trace.push_back({{"type", "round"}, {"index", round_index}, {"round", done.to_json()}});
            for (const auto& c : rec.chunks) {
                json j = c.to_json();
                j["type"] = "chunk";
                trace.push_back(std::move(j));
            }
            append_jsonl(paths_->search_trace(), trace);
            if (knobs_.search.surrogate_trace)
                append_jsonl(paths_->surrogate_trace(), rec.surrogate);
        }
        std::move(rec.chunks.begin(), rec.chunks.end(), std::back_inserter(chunks_));
        persist();
    }

    void persist()
    {
        ledger_.used = used();
        if (!paths_)
            return;
        writer_->flush(archive_);
        write_text(paths_->manifest(), manifest().dump(2) + "\n");
    }

    CogCatalog catalog_;
    Evaluator* evaluator_;
    EvaluatorSpec spec_;
    DriverKnobs knobs_;
    std::uint64_t seed_;
    ResultArchive archive_;
    BudgetLedger ledger_;
    std::int64_t chunk_counter_ = 0;
    int session_ = 0;
    Configuration frozen_;
    bool prefilter_done_ = false;
    json prefilter_report_ = json::object();
    std::vector<Prefilter> prefilters_;
    std::vector<ChunkRecord> chunks_;
    json source_;
    std::string status_ = "new";
    std::optional<RunPaths> paths_;
    std::optional<ArchiveWriter> writer_;
};

struct RunResult {
    ResultArchive archive;
    std::vector<Observation> selected;
    BudgetLedger ledger;
};

/// In-memory run without persistence.
inline RunResult adaseek_run(const CogCatalog& catalog, Evaluator& evaluator, std::int64_t total,
                             const DriverKnobs& knobs, std::uint64_t seed, const EvaluatorSpec& spec = {})
{
    AdaSeekRun run(catalog, evaluator, spec, knobs, seed);
    auto out = run.run(total);
    return {run.archive(), std::move(out.selected), run.ledger()};
}

/// Continues the run persisted in `dir` up to `new_total` evaluations.
inline RunResult resume_run(const fs::path& dir, Evaluator& evaluator, std::int64_t new_total)
{
    AdaSeekRun run = AdaSeekRun::load(dir, evaluator);
    auto out = run.run(new_total);
    return {run.archive(), std::move(out.selected), run.ledger()};
}

} // namespace adaseek

#endif
