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

#ifndef ADASEEK_CLI_HPP
#define ADASEEK_CLI_HPP

// Command-line front end.
//
//   adaseek optimize   --surface f.json [--space s.json] --budget N --out DIR
//   adaseek baseline   {random|grid|flat_tpe} --surface f.json --budget N --out DIR
//   adaseek report     ARCHIVE... [--objectives quality,cost] [--out DIR]
//   adaseek gen-surface --seed S --steps N --cogs-per-step C --options M --out DIR
//
// Settings come from --config run.json, then ADASEEK_SEED, then flags.
// Exit codes: 0 ok, 1 internal error, 2 bad configuration, 3 run directory
// locked, 4 evaluator setup failure, 5 grid too large, 6 corrupt archive.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "baselines.hpp"
#include "cogspace.hpp"
#include "driver.hpp"
#include "hypervolume.hpp"
#include "objectives.hpp"
#include "persist.hpp"
#include "simflow.hpp"

namespace adaseek::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kBadConfig = 2,
    kLocked = 3,
    kEvaluatorSetup = 4,
    kGridTooLarge = 5,
    kCorruptArchive = 6,
};

/// Error carrying the exit code it maps to.
class CliError : public std::runtime_error {
public:
    CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

struct RunConfig {
    std::optional<std::string> space;
    std::optional<std::string> surface;
    std::optional<std::string> out;
    std::optional<std::int64_t> budget;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> objectives;
    std::vector<std::string> thresholds;
    std::optional<std::string> scalarizer;
    std::optional<double> alpha;
    std::optional<int> eta;
    std::optional<int> chunk_size;
    std::optional<double> gamma;
    std::optional<double> smoothing;
    std::optional<int> n_candidates;
    std::optional<bool> early_stop;
    std::optional<int> es_window;
    std::optional<double> es_epsilon;
    std::optional<int> parallel;
    std::optional<bool> paper_exact_sqrt;
    std::optional<std::string> layers;
    std::optional<bool> prefilter_importance;
    std::optional<double> importance_top_percent;
    std::optional<bool> prefilter_complexity;
    std::optional<int> evolve_k;
    std::optional<int> select_k;
    std::optional<bool> surrogate_trace;
    std::optional<std::string> baseline;

    /// Fills fields still unset from a flat run.json document.
    void fill_from(const json& j)
    {
        if (!j.is_object())
            throw CliError(kBadConfig, "run config must be a JSON object");
        static const std::set<std::string> known = {
            "space",         "surface",         "out",          "budget",           "seed",
            "objectives",    "thresholds",      "scalarizer",   "alpha",            "eta",
            "chunk_size",    "gamma",           "smoothing",    "n_candidates",     "early_stop",
            "es_window",     "es_epsilon",      "parallel",     "paper_exact_sqrt", "layers",
            "prefilter_importance", "importance_top_percent", "prefilter_complexity", "evolve_k",
            "select_k",      "surrogate_trace", "baseline"};
        for (auto it = j.begin(); it != j.end(); ++it)
            if (known.count(it.key()) == 0)
                throw CliError(kBadConfig, "unknown run config field '" + it.key() + "'");
        try {
            take(j, "space", space);
            take(j, "surface", surface);
            take(j, "out", out);
            take(j, "budget", budget);
            take(j, "seed", seed);
            if (!objectives && j.contains("objectives")) {
                const auto& o = j["objectives"];
                if (o.is_array()) {
                    std::string s;
                    for (const auto& x : o)
                        s += (s.empty() ? "" : ",") + x.get<std::string>();
                    objectives = s;
                } else {
                    objectives = o.get<std::string>();
                }
            }
            if (thresholds.empty() && j.contains("thresholds"))
                thresholds = j["thresholds"].get<std::vector<std::string>>();
            take(j, "scalarizer", scalarizer);
            take(j, "alpha", alpha);
            take(j, "eta", eta);
            take(j, "chunk_size", chunk_size);
            take(j, "gamma", gamma);
            take(j, "smoothing", smoothing);
            take(j, "n_candidates", n_candidates);
            take(j, "early_stop", early_stop);
            take(j, "es_window", es_window);
            take(j, "es_epsilon", es_epsilon);
            take(j, "parallel", parallel);
            take(j, "paper_exact_sqrt", paper_exact_sqrt);
            if (!layers && j.contains("layers"))
                layers = j["layers"].is_number() ? std::to_string(j["layers"].get<int>())
                                                 : j["layers"].get<std::string>();
            take(j, "prefilter_importance", prefilter_importance);
            take(j, "importance_top_percent", importance_top_percent);
            take(j, "prefilter_complexity", prefilter_complexity);
            take(j, "evolve_k", evolve_k);
            take(j, "select_k", select_k);
            take(j, "surrogate_trace", surrogate_trace);
            take(j, "baseline", baseline);
        } catch (const json::exception& e) {
            throw CliError(kBadConfig, std::string("run config: ") + e.what());
        }
    }

    EvaluatorSpec evaluator_spec() const
    {
        EvaluatorSpec spec;
        spec.objectives.clear();
        std::stringstream ss(objectives.value_or("quality,cost"));
        std::string item;
        try {
            while (std::getline(ss, item, ','))
                if (!item.empty())
                    spec.objectives.push_back(parse_metric(item));
            for (const auto& t : thresholds)
                spec.thresholds.push_back(parse_threshold(t));
            const auto s = scalarizer.value_or("automatic");
            if (s == "quality")
                spec.scalarizer = Scalarizer::quality;
            else if (s == "quality_per_cost")
                spec.scalarizer = Scalarizer::quality_per_cost;
            else if (s != "automatic")
                throw ArgumentError("unknown scalarizer '" + s + "'");
            spec.validate();
        } catch (const std::exception& e) {
            throw CliError(kBadConfig, e.what());
        }
        return spec;
    }

    DriverKnobs knobs() const
    {
        DriverKnobs k;
        k.alpha = alpha.value_or(k.alpha);
        k.search.eta = eta.value_or(k.search.eta);
        k.search.chunk_size = chunk_size.value_or(k.search.chunk_size);
        k.search.tpe.gamma = gamma.value_or(k.search.tpe.gamma);
        k.search.tpe.smoothing = smoothing.value_or(k.search.tpe.smoothing);
        k.search.tpe.n_candidates = n_candidates.value_or(k.search.tpe.n_candidates);
        k.search.early_stop = early_stop.value_or(k.search.early_stop);
        k.search.es_window = es_window.value_or(k.search.es_window);
        k.search.es_epsilon = es_epsilon.value_or(k.search.es_epsilon);
        k.search.parallel = parallel.value_or(k.search.parallel);
        k.search.surrogate_trace = surrogate_trace.value_or(false);
        k.paper_exact_sqrt = paper_exact_sqrt.value_or(false);
        const auto l = layers.value_or("auto");
        if (l == "auto")
            k.forced_layers = 0;
        else if (l == "1" || l == "2" || l == "3")
            k.forced_layers = l[0] - '0';
        else
            throw CliError(kBadConfig, "layers must be auto, 1, 2 or 3");
        if (select_k && *select_k < 1)
            throw CliError(kBadConfig, "select_k must be >= 1");
        k.select_k = static_cast<std::size_t>(select_k.value_or(4));
        try {
            validate_knobs(k);
        } catch (const std::exception& e) {
            throw CliError(kBadConfig, e.what());
        }
        return k;
    }

    static Threshold parse_threshold(const std::string& text)
    {
        for (const char* op : {">=", "<=", ":"}) {
            const auto pos = text.find(op);
            if (pos == std::string::npos)
                continue;
            Threshold t;
            t.metric = parse_metric(text.substr(0, pos));
            const std::string op_s(op);
            if ((op_s == ">=" && !maximized(t.metric)) || (op_s == "<=" && maximized(t.metric)))
                throw ArgumentError("threshold '" + text + "' points the wrong way for its metric");
            t.bound = std::stod(text.substr(pos + op_s.size()));
            return t;
        }
        throw ArgumentError("threshold '" + text + "' must look like quality>=0.5 or cost<=3");
    }

private:
    template <class T>
    static void take(const json& j, const char* key, std::optional<T>& field)
    {
        if (!field && j.contains(key))
            field = j[key].get<T>();
    }
};

// --- helpers ---------------------------------------------------------------------

inline json read_config_json(const std::string& path)
{
    if (!fs::exists(path))
        throw CliError(kBadConfig, "file not found: " + path);
    try {
        return read_json(path);
    } catch (const std::exception& e) {
        throw CliError(kBadConfig, e.what());
    }
}

inline void apply_env_seed(RunConfig& cfg, bool seed_flag_given)
{
    if (seed_flag_given)
        return;
    if (const char* env = std::getenv("ADASEEK_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw CliError(kBadConfig, std::string("ADASEEK_SEED is not an integer: ") + env);
        }
    }
}

struct EvaluatorSetup {
    SimWorkflow workflow;
    CogCatalog catalog;
    json source;
};

/// Builds the simulator and the catalog to search. A space file, when given,
/// must name only cogs and options the surface knows.
inline EvaluatorSetup setup_evaluator(const RunConfig& cfg)
{
    if (!cfg.surface)
        throw CliError(kBadConfig, "--surface is required");
    const json surface_doc = read_config_json(*cfg.surface);
    std::optional<json> space_doc;
    if (cfg.space)
        space_doc = read_config_json(*cfg.space);
    EvaluatorSetup s;
    try {
        s.source = SurfaceParams::from_json(surface_doc).to_json();
        s.workflow = generate_surface(SurfaceParams::from_json(surface_doc));
    } catch (const std::exception& e) {
        throw CliError(kEvaluatorSetup, std::string("surface: ") + e.what());
    }
    if (!space_doc) {
        s.catalog = s.workflow.catalog;
        return s;
    }
    try {
        s.catalog = build_catalog(*space_doc);
    } catch (const std::exception& e) {
        throw CliError(kBadConfig, std::string("space: ") + e.what());
    }
    for (const auto& c : s.workflow.catalog.cogs())
        if (s.catalog.find(c.id) == nullptr)
            throw CliError(kEvaluatorSetup, "space does not cover surface cog '" + c.id + "'");
    for (const auto& c : s.catalog.cogs()) {
        const SurfaceCog* sc = s.workflow.surface.find(c.id);
        if (sc == nullptr)
            throw CliError(kEvaluatorSetup, "surface has no cog '" + c.id + "'");
        for (const auto& o : c.options)
            if (sc->find(o.id) == nullptr && o.provenance != Provenance::evolved)
                throw CliError(kEvaluatorSetup, "surface has no option '" + o.id + "' for cog '" + c.id + "'");
    }
    return s;
}

inline std::unique_ptr<SimEvaluator> make_evaluator(const SimWorkflow& w, const EvaluatorSpec& spec, int evolve_k)
{
    auto ev = std::make_unique<SimEvaluator>(w, static_cast<std::size_t>(std::max(0, evolve_k)));
    ev->set_spec(spec);
    return ev;
}

inline std::string frontier_table(const std::vector<Observation>& frontier)
{
    std::ostringstream s;
    s << std::left << std::setw(8) << "eval" << std::setw(12) << "quality" << std::setw(12) << "cost"
      << std::setw(12) << "latency" << "key\n";
    for (const auto& o : frontier)
        s << std::setw(8) << o.eval_index << std::setw(12) << std::setprecision(5) << o.metrics.quality
          << std::setw(12) << o.metrics.cost << std::setw(12) << o.metrics.latency << o.key() << "\n";
    return s.str();
}

// --- commands ---------------------------------------------------------------------

inline int resume_optimize(const SimWorkflow& w, const json& manifest, const fs::path& dir, const RunConfig& cfg,
                           std::ostream& out, std::ostream& err)
{
    std::optional<RunLock> lock;
    try {
        lock.emplace(dir);
    } catch (const LockedError& e) {
        throw CliError(kLocked, e.what());
    }
    EvaluatorSpec spec;
    try {
        spec = spec_from_json(manifest.at("evaluator"));
    } catch (const std::exception& e) {
        throw CliError(kCorruptArchive, std::string("manifest: ") + e.what());
    }
    auto evaluator = make_evaluator(w, spec, cfg.evolve_k.value_or(2));
    std::optional<AdaSeekRun> run;
    try {
        run.emplace(AdaSeekRun::load(dir, *evaluator));
    } catch (const CorruptFileError& e) {
        throw CliError(kCorruptArchive, e.what());
    } catch (const SchemaError& e) {
        throw CliError(kCorruptArchive, e.what());
    }
    if (run->used() >= *cfg.budget)
        err << "budget " << *cfg.budget << " does not exceed the " << run->used()
            << " evaluations already spent; nothing to do\n";
    run->run(*cfg.budget);
    out << run->summary();
    return kOk;
}

inline int cmd_optimize(RunConfig cfg, bool resume, std::ostream& out, std::ostream& err)
{
    if (!cfg.out)
        throw CliError(kBadConfig, "--out is required");
    if (!cfg.budget || *cfg.budget < 1)
        throw CliError(kBadConfig, "budget must be >= 1");
    const fs::path dir(*cfg.out);
    const RunPaths paths{dir};
    const bool existing = fs::exists(paths.manifest());
    if (existing && !resume)
        throw CliError(kBadConfig, "run directory already holds a run; pass --resume to continue it");

    if (existing) {
        json manifest;
        try {
            manifest = read_json(paths.manifest());
        } catch (const std::exception& e) {
            throw CliError(kCorruptArchive, e.what());
        }
        RunConfig src = cfg;
        if (!src.surface) {
            // Rebuild the evaluator from the parameters stored with the run.
            if (!manifest.contains("source") || manifest["source"].is_null())
                throw CliError(kEvaluatorSetup, "manifest does not describe its evaluator; pass --surface");
            SimWorkflow w;
            try {
                w = generate_surface(SurfaceParams::from_json(manifest["source"]));
            } catch (const std::exception& e) {
                throw CliError(kEvaluatorSetup, std::string("stored surface: ") + e.what());
            }
            return resume_optimize(w, manifest, dir, cfg, out, err);
        }
        const EvaluatorSetup setup = setup_evaluator(src);
        return resume_optimize(setup.workflow, manifest, dir, cfg, out, err);
    }

    const EvaluatorSpec spec = cfg.evaluator_spec();
    const DriverKnobs knobs = cfg.knobs();
    const EvaluatorSetup setup = setup_evaluator(cfg);
    auto evaluator = make_evaluator(setup.workflow, spec, cfg.evolve_k.value_or(2));

    fs::create_directories(dir);
    std::optional<RunLock> lock;
    try {
        lock.emplace(dir);
    } catch (const LockedError& e) {
        throw CliError(kLocked, e.what());
    }
    AdaSeekRun run(setup.catalog, *evaluator, spec, knobs, cfg.seed.value_or(0));
    run.set_source(setup.source);
    if (cfg.prefilter_complexity.value_or(false))
        run.add_prefilter(
            complexity_prefilter(setup.workflow.graph, default_ratings(setup.workflow.graph, setup.workflow.surface.params.seed)));
    if (cfg.prefilter_importance.value_or(false))
        run.add_prefilter(importance_prefilter(cheapest_options(setup.workflow.surface),
                                               cfg.importance_top_percent.value_or(50.0)));
    run.attach(dir);
    run.run(*cfg.budget);
    out << run.summary();
    (void)err;
    return kOk;
}

inline int cmd_baseline(RunConfig cfg, std::ostream& out, std::ostream& err)
{
    if (!cfg.baseline)
        throw CliError(kBadConfig, "baseline kind is required (random, grid, flat_tpe)");
    BaselineKind kind;
    try {
        kind = parse_baseline(*cfg.baseline);
    } catch (const std::exception& e) {
        throw CliError(kBadConfig, e.what());
    }
    if (!cfg.out)
        throw CliError(kBadConfig, "--out is required");
    if (kind != BaselineKind::grid && (!cfg.budget || *cfg.budget < 1))
        throw CliError(kBadConfig, "budget must be >= 1");
    const EvaluatorSpec spec = cfg.evaluator_spec();
    const DriverKnobs knobs = cfg.knobs();
    const EvaluatorSetup setup = setup_evaluator(cfg);
    if (kind == BaselineKind::grid && space_size(setup.catalog) > kMaxGridSpace)
        throw CliError(kGridTooLarge, "grid over " + std::to_string(space_size(setup.catalog)) +
                                          " configurations exceeds the 2^20 limit");
    auto evaluator = make_evaluator(setup.workflow, spec, 0);

    const fs::path dir(*cfg.out);
    fs::create_directories(dir);
    std::optional<RunLock> lock;
    try {
        lock.emplace(dir);
    } catch (const LockedError& e) {
        throw CliError(kLocked, e.what());
    }
    const std::uint64_t seed = cfg.seed.value_or(0);
    const ResultArchive archive =
        run_baseline(kind, setup.catalog, *evaluator, spec, cfg.budget.value_or(0), seed, knobs.search);
    const RunPaths paths{dir};
    write_archive(paths.archive(), archive);
    const auto frontier = pareto_frontier(archive, spec);
    write_text(paths.frontier(), frontier_csv(frontier));
    const json manifest = {{"format_version", kManifestFormatVersion},
                           {"kind", "baseline"},
                           {"baseline", std::string(to_string(kind))},
                           {"seed", seed},
                           {"budget", cfg.budget.value_or(0)},
                           {"evaluations", archive.size()},
                           {"catalog", catalog_to_json(setup.catalog)},
                           {"catalog_version", setup.catalog.version()},
                           {"evaluator", spec_to_json(spec)},
                           {"knobs", knobs_to_json(knobs)},
                           {"archive_lines", archive.size()},
                           {"status", "complete"},
                           {"source", setup.source}};
    write_text(paths.manifest(), manifest.dump(2) + "\n");
    std::ostringstream summary;
    summary << to_string(kind) << " evaluations " << archive.size() << "\n" << frontier_table(frontier);
    write_text(paths.summary(), summary.str());
    out << summary.str();
    (void)err;
    return kOk;
}

inline fs::path archive_file(const std::string& arg)
{
    const fs::path p(arg);
    return fs::is_directory(p) ? p / "archive.jsonl" : p;
}

inline int cmd_report(const std::vector<std::string>& inputs, const RunConfig& cfg, std::ostream& out,
                      std::ostream& err)
{
    if (inputs.empty())
        throw CliError(kBadConfig, "report needs at least one archive");
    const EvaluatorSpec spec = cfg.evaluator_spec();
    std::vector<ResultArchive> archives;
    for (const auto& in : inputs) {
        const fs::path file = archive_file(in);
        if (!fs::exists(file))
            throw CliError(kBadConfig, "archive not found: " + file.string());
        try {
            archives.push_back(read_archive(file));
        } catch (const CorruptFileError& e) {
            throw CliError(kCorruptArchive, e.what());
        }
    }
    std::vector<const ResultArchive*> ptrs;
    for (const auto& a : archives)
        ptrs.push_back(&a);
    const MetricVector ref = reference_point(ptrs);

    std::optional<fs::path> dir;
    if (cfg.out) {
        dir = fs::path(*cfg.out);
        fs::create_directories(*dir);
    }
    std::ostringstream csv;
    csv << "archive,evaluations,frontier_size,hypervolume,best_quality,best_cost,best_latency,ref_quality,ref_cost,"
           "ref_latency\n";
    std::ostringstream table;
    table << std::left << std::setw(32) << "archive" << std::setw(8) << "evals" << std::setw(10) << "frontier"
          << std::setw(14) << "hypervolume" << std::setw(12) << "best_q" << std::setw(12) << "best_cost"
          << "best_latency\n";
    for (std::size_t i = 0; i < archives.size(); ++i) {
        const auto frontier = pareto_frontier(archives[i], spec);
        const double hv = frontier_hypervolume(frontier, spec, ref);
        double bq = 0.0, bc = std::numeric_limits<double>::infinity(), bl = bc;
        bool any = false;
        for (const auto& o : archives[i].observations()) {
            if (!o.feasible)
                continue;
            any = true;
            bq = std::max(bq, o.metrics.quality);
            bc = std::min(bc, o.metrics.cost);
            bl = std::min(bl, o.metrics.latency);
        }
        if (!any)
            bc = bl = 0.0;
        if (dir)
            write_text(*dir / ("frontier_" + std::to_string(i) + ".csv"), frontier_csv(frontier));
        csv << csv_field(inputs[i]) << ',' << archives[i].size() << ',' << frontier.size() << ','
            << format_double(hv) << ',' << format_double(bq) << ',' << format_double(bc) << ','
            << format_double(bl) << ',' << format_double(ref.quality) << ',' << format_double(ref.cost) << ','
            << format_double(ref.latency) << '\n';
        table << std::setw(32) << inputs[i] << std::setw(8) << archives[i].size() << std::setw(10)
              << frontier.size() << std::setw(14) << std::setprecision(6) << hv << std::setw(12) << bq
              << std::setw(12) << bc << bl << "\n";
    }
    if (dir) {
        write_text(*dir / "comparison.csv", csv.str());
        write_text(*dir / "report.txt", table.str());
    }
    out << table.str();
    (void)err;
    return kOk;
}

inline int cmd_gen_surface(const SurfaceParams& params, const std::optional<std::string>& out_dir,
                           std::ostream& out)
{
    if (!out_dir)
        throw CliError(kBadConfig, "--out is required");
    SimWorkflow w;
    try {
        w = generate_surface(params);
    } catch (const SizeError& e) {
        throw CliError(kBadConfig, e.what());
    } catch (const ArgumentError& e) {
        throw CliError(kBadConfig, e.what());
    }
    const fs::path dir(*out_dir);
    fs::create_directories(dir);
    write_text(dir / "surface.json", params.to_json().dump(2) + "\n");
    write_text(dir / "space.json", catalog_to_json(w.catalog).dump(2) + "\n");
    write_text(dir / "surface_dump.json", w.dump().dump(2) + "\n");
    out << "cogs " << w.catalog.cogs().size() << " configurations " << space_size(w.catalog) << "\n";
    if (w.surface.optimum_key)
        out << "optimum quality " << w.surface.optimum_quality << " at " << *w.surface.optimum_key << "\n";
    return kOk;
}

// --- entry point ------------------------------------------------------------------

namespace detail {

inline void add_run_flags(CLI::App* app, RunConfig& cfg, std::string& config_path)
{
    app->add_option("--config", config_path, "flat run.json with defaults for every flag");
    app->add_option("--space", cfg.space, "space description (cogs and options)");
    app->add_option("--surface", cfg.surface, "simulator surface spec");
    app->add_option("--out", cfg.out, "output directory");
    app->add_option("--budget", cfg.budget, "total evaluations");
    app->add_option("--seed", cfg.seed, "run seed (overrides ADASEEK_SEED)");
    app->add_option("--objectives", cfg.objectives, "comma list of quality, cost, latency");
    app->add_option("--threshold", cfg.thresholds, "metric bound such as quality>=0.6 or cost<=4");
    app->add_option("--scalarizer", cfg.scalarizer, "automatic, quality or quality_per_cost");
    app->add_option("--alpha", cfg.alpha, "layer size exponent");
    app->add_option("--eta", cfg.eta, "halving rate");
    app->add_option("--chunk-size", cfg.chunk_size, "configurations per chunk");
    app->add_option("--gamma", cfg.gamma, "good-group quantile");
    app->add_option("--smoothing", cfg.smoothing, "pseudo-count per option");
    app->add_option("--n-candidates", cfg.n_candidates, "candidates drawn per proposal");
    app->add_option("--early-stop", cfg.early_stop, "true or false");
    app->add_option("--es-window", cfg.es_window, "early-stop window");
    app->add_option("--es-epsilon", cfg.es_epsilon, "early-stop relative tolerance");
    app->add_option("--parallel", cfg.parallel, "concurrent top-level searches");
    app->add_flag("--paper-exact-sqrt{true}", cfg.paper_exact_sqrt, "square-root budget partition for every L");
    app->add_option("--layers", cfg.layers, "auto, 1, 2 or 3");
    app->add_flag("--prefilter-importance{true}", cfg.prefilter_importance, "probe step importance first");
    app->add_option("--importance-top-percent", cfg.importance_top_percent, "steps kept by the importance probe");
    app->add_flag("--prefilter-complexity{true}", cfg.prefilter_complexity, "restrict architecture cogs by complexity");
    app->add_option("--evolve-k", cfg.evolve_k, "options derived per dynamic cog at chunk boundaries");
    app->add_option("--select-k", cfg.select_k, "configurations returned");
    app->add_flag("--surrogate-trace{true}", cfg.surrogate_trace, "write fitted densities");
}

} // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"adaptive hierarchical search over discrete workflow configurations"};
    app.require_subcommand(1);

    RunConfig opt_cfg, base_cfg, rep_cfg;
    std::string opt_config, base_config, rep_config;
    bool resume = false;

    auto* optimize = app.add_subcommand("optimize", "run the adaptive search");
    detail::add_run_flags(optimize, opt_cfg, opt_config);
    optimize->add_flag("--resume", resume, "continue the run stored in --out");

    auto* baseline = app.add_subcommand("baseline", "run a reference search");
    baseline->add_option("kind", base_cfg.baseline, "random, grid or flat_tpe");
    detail::add_run_flags(baseline, base_cfg, base_config);

    auto* report = app.add_subcommand("report", "compare archives");
    std::vector<std::string> inputs;
    report->add_option("archives", inputs, "archive files or run directories")->required();
    report->add_option("--objectives", rep_cfg.objectives, "comma list of quality, cost, latency");
    report->add_option("--threshold", rep_cfg.thresholds, "metric bound");
    report->add_option("--out", rep_cfg.out, "directory for CSV output");

    auto* gen = app.add_subcommand("gen-surface", "write a seeded simulator surface");
    SurfaceParams sp;
    std::optional<std::string> gen_out, gen_spec;
    gen->add_option("--spec", gen_spec, "existing surface.json to expand");
    gen->add_option("--seed", sp.seed);
    gen->add_option("--steps", sp.n_steps);
    gen->add_option("--cogs-per-step", sp.cogs_per_step);
    gen->add_option("--options", sp.options_per_cog);
    gen->add_option("--density", sp.interaction_density);
    gen->add_option("--noise", sp.noise_sd);
    gen->add_option("--effect-sd", sp.effect_sd);
    gen->add_option("--interaction-sd", sp.interaction_sd);
    gen->add_flag("--dynamic-weights", sp.dynamic_weights);
    gen->add_option("--out", gen_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kBadConfig;
    }

    try {
        if (optimize->parsed()) {
            const bool seed_flag = optimize->get_option("--seed")->count() > 0;
            if (!opt_config.empty())
                opt_cfg.fill_from(read_config_json(opt_config));
            apply_env_seed(opt_cfg, seed_flag);
            return cmd_optimize(opt_cfg, resume, out, err);
        }
        if (baseline->parsed()) {
            const bool seed_flag = baseline->get_option("--seed")->count() > 0;
            if (!base_config.empty())
                base_cfg.fill_from(read_config_json(base_config));
            apply_env_seed(base_cfg, seed_flag);
            return cmd_baseline(base_cfg, out, err);
        }
        if (report->parsed())
            return cmd_report(inputs, rep_cfg, out, err);
        if (gen->parsed()) {
            if (gen_spec) {
                try {
                    sp = SurfaceParams::from_json(read_config_json(*gen_spec));
                } catch (const SchemaError& e) {
                    throw CliError(kBadConfig, e.what());
                }
            }
            return cmd_gen_surface(sp, gen_out, out);
        }
    } catch (const CliError& e) {
        err << "error: " << e.what() << "\n";
        return e.code();
    } catch (const CorruptFileError& e) {
        err << "error: " << e.what() << "\n";
        return kCorruptArchive;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}

} // namespace adaseek::cli

#endif
