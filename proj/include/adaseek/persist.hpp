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

#ifndef ADASEEK_PERSIST_HPP
#define ADASEEK_PERSIST_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include "cogspace.hpp"
#include "objectives.hpp"

namespace adaseek {

namespace fs = std::filesystem;

/// Shortest round-trip decimal form.
inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        return "nan";
    return std::string(buf, end);
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// --- evaluator spec ---------------------------------------------------------------

inline json spec_to_json(const EvaluatorSpec& spec)
{
    json objectives = json::array();
    for (auto m : spec.objectives)
        objectives.push_back(std::string(to_string(m)));
    json thresholds = json::array();
    for (const auto& t : spec.thresholds)
        thresholds.push_back({{"metric", std::string(to_string(t.metric))}, {"bound", t.bound}});
    std::string scalarizer = spec.scalarizer == Scalarizer::quality            ? "quality"
                             : spec.scalarizer == Scalarizer::quality_per_cost ? "quality_per_cost"
                                                                                : "automatic";
    return {{"objectives", objectives},
            {"thresholds", thresholds},
            {"scalarizer", scalarizer},
            {"selection_weights", spec.selection_weights}};
}

inline EvaluatorSpec spec_from_json(const json& j)
{
    EvaluatorSpec spec;
    spec.objectives.clear();
    for (const auto& o : j.at("objectives"))
        spec.objectives.push_back(parse_metric(o.get<std::string>()));
    for (const auto& t : j.value("thresholds", json::array()))
        spec.thresholds.push_back({parse_metric(t.at("metric").get<std::string>()), t.at("bound").get<double>()});
    const auto s = j.value("scalarizer", std::string("automatic"));
    if (s == "quality")
        spec.scalarizer = Scalarizer::quality;
    else if (s == "quality_per_cost")
        spec.scalarizer = Scalarizer::quality_per_cost;
    else if (s == "automatic")
        spec.scalarizer = Scalarizer::automatic;
    else
        throw SchemaError("unknown scalarizer '" + s + "'");
    spec.selection_weights = j.value("selection_weights", std::vector<int>{});
    spec.validate();
    return spec;
}

// --- archive.jsonl ------------------------------------------------------------------

inline json observation_to_json(const Observation& o)
{
    return {{"eval_index", o.eval_index},
            {"canonical_key", o.key()},
            {"assignments", configuration_to_json(o.config)},
            {"catalog_version", o.config.catalog_version},
            {"metrics", {{"quality", o.metrics.quality}, {"cost", o.metrics.cost}, {"latency", o.metrics.latency}}},
            {"feasible", o.feasible},
            {"chunk_id", o.chunk_id},
            {"layer_round", o.layer_round},
            {"cached", o.cached},
            {"failed", o.failed}};
}

inline Observation observation_from_json(const json& j)
{
    Observation o;
    o.eval_index = j.at("eval_index").get<std::int64_t>();
    o.config = configuration_from_json(j.at("assignments"), j.value("catalog_version", std::int64_t{0}));
    if (j.at("canonical_key").get<std::string>() != o.key())
        throw SchemaError("canonical_key does not match assignments");
    const auto& m = j.at("metrics");
    o.metrics = {m.at("quality").get<double>(), m.at("cost").get<double>(), m.at("latency").get<double>()};
    o.feasible = j.at("feasible").get<bool>();
    o.chunk_id = j.at("chunk_id").get<std::int64_t>();
    o.layer_round = j.at("layer_round").get<int>();
    o.cached = j.value("cached", false);
    o.failed = j.value("failed", false);
    return o;
}

inline std::string observation_line(const Observation& o) { return observation_to_json(o).dump(); }

/// Reads an archive; every line must parse and eval_index must equal the
/// line position.
inline ResultArchive read_archive(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw CorruptFileError(path.string(), 0, "cannot open");
    ResultArchive archive;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            auto obs = observation_from_json(json::parse(line));
            if (obs.eval_index != static_cast<std::int64_t>(archive.size()))
                throw SchemaError("eval_index " + std::to_string(obs.eval_index) + " out of sequence");
            archive.append(std::move(obs));
        } catch (const std::exception& e) {
            throw CorruptFileError(path.string(), lineno, e.what());
        }
    }
    return archive;
}

inline void write_archive(const fs::path& path, const ResultArchive& archive)
{
    std::ofstream out(path, std::ios::trunc);
    for (const auto& o : archive.observations())
        out << observation_line(o) << '\n';
}

inline std::string frontier_csv(std::span<const Observation> frontier)
{
    std::ostringstream out;
    out << "eval_index,quality,cost,latency,key\n";
    for (const auto& o : frontier)
        out << o.eval_index << ',' << format_double(o.metrics.quality) << ',' << format_double(o.metrics.cost) << ','
            << format_double(o.metrics.latency) << ',' << csv_field(o.key()) << '\n';
    return out.str();
}

inline void write_text(const fs::path& path, const std::string& text)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << text;
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

// --- run directory ----------------------------------------------------------------

class LockedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exclusive lock on a run directory, released on destruction.
class RunLock {
public:
    explicit RunLock(const fs::path& dir) : path_(dir / "lock")
    {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw LockedError("run directory is locked: " + path_.string());
    }
    ~RunLock()
    {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

struct RunPaths {
    fs::path dir;
    fs::path manifest() const { return dir / "manifest.json"; }
    fs::path archive() const { return dir / "archive.jsonl"; }
    fs::path frontier() const { return dir / "frontier.csv"; }
    fs::path summary() const { return dir / "summary.txt"; }
    fs::path search_trace() const { return dir / "search_trace.jsonl"; }
    fs::path surrogate_trace() const { return dir / "surrogate_trace.jsonl"; }
};

/// Appends archive lines incrementally; the archive file only ever grows.
class ArchiveWriter {
public:
    ArchiveWriter(fs::path path, std::size_t already_written) : path_(std::move(path)), written_(already_written) {}

    void flush(const ResultArchive& archive)
    {
        if (written_ >= archive.size())
            return;
        std::ofstream out(path_, std::ios::app);
        for (; written_ < archive.size(); ++written_)
            out << observation_line(archive[written_]) << '\n';
    }

    std::size_t written() const { return written_; }

private:
    fs::path path_;
    std::size_t written_;
};

inline void append_jsonl(const fs::path& path, const std::vector<json>& records)
{
    if (records.empty())
        return;
    std::ofstream out(path, std::ios::app);
    for (const auto& r : records)
        out << r.dump() << '\n';
}

} // namespace adaseek

#endif
