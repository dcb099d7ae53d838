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

#ifndef ADASEEK_COGSPACE_HPP
#define ADASEEK_COGSPACE_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace adaseek {

using json = nlohmann::json;

enum class Category { architecture, step, weight };

inline std::string_view to_string(Category c)
{
    switch (c) {
    case Category::architecture:
        return "architecture";
    case Category::step:
        return "step";
    case Category::weight:
        return "weight";
    }
    return "?";
}

inline std::optional<Category> parse_category(std::string_view s)
{
    if (s == "architecture")
        return Category::architecture;
    if (s == "step")
        return Category::step;
    if (s == "weight")
        return Category::weight;
    return std::nullopt;
}

enum class Provenance { static_option, evolved };

/// Target value for cogs that act on the whole workflow rather than one step.
inline constexpr std::string_view kGlobalTarget = "global";

struct OptionRef {
    std::string id;
    json payload; // opaque to the optimizer
    Provenance provenance = Provenance::static_option;
};

struct Cog {
    std::string id;
    Category category = Category::step;
    std::string target{kGlobalTarget};
    std::vector<OptionRef> options;
    bool dynamic = false;

    std::optional<std::size_t> option_index(std::string_view option_id) const
    {
        for (std::size_t i = 0; i < options.size(); ++i)
            if (options[i].id == option_id)
                return i;
        return std::nullopt;
    }
};

/// A total (or, inside layer search, partial) assignment of options to cogs.
/// Assignments are kept in a sorted map so iteration order never depends on
/// insertion order.
struct Configuration {
    std::map<std::string, std::string> assignments;
    std::int64_t catalog_version = 0;

    bool operator==(const Configuration& other) const { return assignments == other.assignments; }
    bool operator<(const Configuration& other) const { return assignments < other.assignments; }

    std::size_t size() const { return assignments.size(); }
    bool empty() const { return assignments.empty(); }

    const std::string* find(const std::string& cog) const
    {
        auto it = assignments.find(cog);
        return it == assignments.end() ? nullptr : &it->second;
    }
};

/// Union of two configurations over disjoint cog sets.
inline Configuration merge(const Configuration& a, const Configuration& b)
{
    Configuration out = a;
    for (const auto& [cog, opt] : b.assignments) {
        auto [it, inserted] = out.assignments.emplace(cog, opt);
        if (!inserted && it->second != opt)
            throw ArgumentError("merge: conflicting assignment for cog '" + cog + "'");
    }
    out.catalog_version = std::max(a.catalog_version, b.catalog_version);
    return out;
}

/// Keeps only the assignments whose cog is in `scope`.
template <class Scope>
Configuration restrict_to(const Configuration& c, const Scope& scope)
{
    Configuration out;
    out.catalog_version = c.catalog_version;
    for (const auto& cog : scope) {
        auto it = c.assignments.find(cog);
        if (it != c.assignments.end())
            out.assignments.emplace(it->first, it->second);
    }
    return out;
}

/// True when every assignment in `prefix` also appears in `c`.
inline bool extends(const Configuration& c, const Configuration& prefix)
{
    for (const auto& [cog, opt] : prefix.assignments) {
        const auto* v = c.find(cog);
        if (v == nullptr || *v != opt)
            return false;
    }
    return true;
}

namespace detail {
inline void escape_into(std::string& out, std::string_view s)
{
    for (char ch : s) {
        if (ch == '\\' || ch == '=' || ch == ';')
            out.push_back('\\');
        out.push_back(ch);
    }
}
} // namespace detail

/// Deterministic, order-independent and version-independent identity of an
/// assignment set. Separators inside ids are escaped, so distinct assignment
/// sets never share a key.
inline std::string canonical_key(const Configuration& config)
{
    std::string out;
    bool first = true;
    for (const auto& [cog, opt] : config.assignments) {
        if (!first)
            out.push_back(';');
        first = false;
        detail::escape_into(out, cog);
        out.push_back('=');
        detail::escape_into(out, opt);
    }
    return out;
}

/// Inverse of canonical_key.
inline Configuration parse_canonical_key(std::string_view key)
{
    Configuration c;
    std::string cog, opt, *cur = &cog;
    bool escaped = false;
    auto flush = [&] {
        if (cog.empty() && opt.empty() && cur == &cog)
            return;
        c.assignments[cog] = opt;
        cog.clear();
        opt.clear();
        cur = &cog;
    };
    for (char ch : key) {
        if (escaped) {
            cur->push_back(ch);
            escaped = false;
        } else if (ch == '\\') {
            escaped = true;
        } else if (ch == '=') {
            cur = &opt;
        } else if (ch == ';') {
            flush();
        } else {
            cur->push_back(ch);
        }
    }
    flush();
    return c;
}

class CogCatalog {
public:
    CogCatalog() = default;

    explicit CogCatalog(std::vector<Cog> cogs, std::int64_t version = 0) : cogs_(std::move(cogs)), version_(version)
    {
        reindex();
    }

    const std::vector<Cog>& cogs() const { return cogs_; }
    std::int64_t version() const { return version_; }
    std::size_t size() const { return cogs_.size(); }

    const Cog* find(std::string_view id) const
    {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &cogs_[it->second];
    }

    const Cog& at(std::string_view id) const
    {
        const Cog* c = find(id);
        if (c == nullptr)
            throw ArgumentError("unknown cog '" + std::string(id) + "'");
        return *c;
    }

    std::size_t position(std::string_view id) const
    {
        auto it = index_.find(std::string(id));
        if (it == index_.end())
            throw ArgumentError("unknown cog '" + std::string(id) + "'");
        return it->second;
    }

    std::vector<std::string> ids() const
    {
        std::vector<std::string> out;
        out.reserve(cogs_.size());
        for (const auto& c : cogs_)
            out.push_back(c.id);
        return out;
    }

    /// Index of `option` within `cog`, or throws.
    std::size_t option_index(std::string_view cog, std::string_view option) const
    {
        auto idx = at(cog).option_index(option);
        if (!idx)
            throw ArgumentError("cog '" + std::string(cog) + "' has no option '" + std::string(option) + "'");
        return *idx;
    }

    /// Every referenced cog and option must exist; `require_complete` also
    /// demands one assignment per cog.
    void validate(const Configuration& config, bool require_complete = true) const
    {
        for (const auto& [cog, opt] : config.assignments)
            option_index(cog, opt);
        if (require_complete && config.assignments.size() != cogs_.size())
            throw ContractError("configuration assigns " + std::to_string(config.assignments.size()) + " of " +
                                std::to_string(cogs_.size()) + " cogs");
    }

    bool is_valid(const Configuration& config, bool require_complete = true) const
    {
        try {
            validate(config, require_complete);
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }

    /// Appends options to a dynamic cog. An empty list is a no-op and leaves
    /// the version unchanged.
    void append_options(std::string_view cog_id, const std::vector<OptionRef>& new_options)
    {
        auto it = index_.find(std::string(cog_id));
        if (it == index_.end())
            throw ArgumentError("unknown cog '" + std::string(cog_id) + "'");
        Cog& cog = cogs_[it->second];
        if (!cog.dynamic)
            throw ContractError("cog '" + cog.id + "' is not dynamic");
        if (new_options.empty())
            return;
        std::set<std::string> seen;
        for (const auto& o : cog.options)
            seen.insert(o.id);
        for (const auto& o : new_options)
            if (!seen.insert(o.id).second)
                throw ArgumentError("duplicate option id '" + o.id + "' for cog '" + cog.id + "'");
        cog.options.insert(cog.options.end(), new_options.begin(), new_options.end());
        ++version_;
    }

    Configuration stamp(Configuration c) const
    {
        c.catalog_version = version_;
        return c;
    }

private:
    void reindex()
    {
        index_.clear();
        for (std::size_t i = 0; i < cogs_.size(); ++i)
            if (!index_.emplace(cogs_[i].id, i).second)
                throw SchemaError("duplicate cog id '" + cogs_[i].id + "'");
    }

    std::vector<Cog> cogs_;
    std::int64_t version_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Value-returning form of CogCatalog::append_options.
inline CogCatalog extend_options(CogCatalog catalog, std::string_view cog_id, const std::vector<OptionRef>& new_options)
{
    catalog.append_options(cog_id, new_options);
    return catalog;
}

// --- space.json -------------------------------------------------------------

namespace detail {
inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw SchemaError("unknown field '" + it.key() + "' in " + std::string(where));
    }
}
} // namespace detail

inline constexpr int kSpaceFormatVersion = 1;

/// Builds a catalog (version 0) from a space description document.
inline CogCatalog build_catalog(const json& doc)
{
    if (!doc.is_object())
        throw SchemaError("space description must be an object");
    detail::reject_unknown(doc, {"version", "cogs"}, "space description");
    if (!doc.contains("version") || !doc["version"].is_number_integer() ||
        doc["version"].get<int>() != kSpaceFormatVersion)
        throw SchemaError("space description: unsupported or missing version");
    if (!doc.contains("cogs") || !doc["cogs"].is_array() || doc["cogs"].empty())
        throw SchemaError("space description must list at least one cog");

    std::vector<Cog> cogs;
    for (const auto& jc : doc["cogs"]) {
        if (!jc.is_object())
            throw SchemaError("cog entry must be an object");
        detail::reject_unknown(jc, {"id", "category", "target", "dynamic", "options"}, "cog");
        Cog cog;
        if (!jc.contains("id") || !jc["id"].is_string() || jc["id"].get<std::string>().empty())
            throw SchemaError("cog without a string id");
        cog.id = jc["id"].get<std::string>();
        if (!jc.contains("category") || !jc["category"].is_string())
            throw SchemaError("cog '" + cog.id + "' without category");
        auto cat = parse_category(jc["category"].get<std::string>());
        if (!cat)
            throw SchemaError("cog '" + cog.id + "' has unknown category '" + jc["category"].get<std::string>() + "'");
        cog.category = *cat;
        if (jc.contains("target")) {
            if (!jc["target"].is_string())
                throw SchemaError("cog '" + cog.id + "' target must be a string");
            cog.target = jc["target"].get<std::string>();
        }
        if (jc.contains("dynamic")) {
            if (!jc["dynamic"].is_boolean())
                throw SchemaError("cog '" + cog.id + "' dynamic must be a boolean");
            cog.dynamic = jc["dynamic"].get<bool>();
        }
        if (!jc.contains("options") || !jc["options"].is_array() || jc["options"].empty())
            throw SchemaError("cog '" + cog.id + "' has an empty option list");
        std::set<std::string> seen;
        for (const auto& jo : jc["options"]) {
            if (!jo.is_object())
                throw SchemaError("option entry of cog '" + cog.id + "' must be an object");
            detail::reject_unknown(jo, {"id", "payload", "provenance"}, "option");
            if (!jo.contains("id") || !jo["id"].is_string())
                throw SchemaError("option of cog '" + cog.id + "' without string id");
            OptionRef o;
            o.id = jo["id"].get<std::string>();
            if (!seen.insert(o.id).second)
                throw SchemaError("duplicate option id '" + o.id + "' in cog '" + cog.id + "'");
            o.payload = jo.value("payload", json());
            if (jo.contains("provenance")) {
                const auto p = jo["provenance"].get<std::string>();
                if (p == "evolved")
                    o.provenance = Provenance::evolved;
                else if (p != "static")
                    throw SchemaError("option '" + o.id + "' has unknown provenance '" + p + "'");
            }
            cog.options.push_back(std::move(o));
        }
        cogs.push_back(std::move(cog));
    }
    return CogCatalog(std::move(cogs), 0);
}

inline json catalog_to_json(const CogCatalog& catalog)
{
    json cogs = json::array();
    for (const auto& c : catalog.cogs()) {
        json opts = json::array();
        for (const auto& o : c.options) {
            json jo = {{"id", o.id}, {"payload", o.payload}};
            if (o.provenance == Provenance::evolved)
                jo["provenance"] = "evolved";
            opts.push_back(std::move(jo));
        }
        cogs.push_back({{"id", c.id},
                        {"category", std::string(to_string(c.category))},
                        {"target", c.target},
                        {"dynamic", c.dynamic},
                        {"options", std::move(opts)}});
    }
    return {{"version", kSpaceFormatVersion}, {"cogs", std::move(cogs)}};
}

// --- layers -----------------------------------------------------------------

/// Per-round grouping of cogs into nested layers, innermost first.
struct LayerPlan {
    int round_L = 1;
    std::vector<std::vector<std::string>> layers;
    std::vector<double> sizes;
    std::vector<std::int64_t> budgets;
};

/// L=1: one layer of everything. L=2: {step, weight} inside {architecture}.
/// L=3: weight inside step inside architecture. Empty layers are kept.
inline LayerPlan group_layers(const CogCatalog& catalog, int L)
{
    if (L < 1 || L > 3)
        throw ArgumentError("layer count must be 1, 2 or 3 (got " + std::to_string(L) + ")");
    LayerPlan plan;
    plan.round_L = L;
    plan.layers.assign(static_cast<std::size_t>(L), {});
    for (const auto& cog : catalog.cogs()) {
        std::size_t layer = 0;
        if (L == 2)
            layer = cog.category == Category::architecture ? 1 : 0;
        else if (L == 3)
            layer = cog.category == Category::weight ? 0 : cog.category == Category::step ? 1 : 2;
        plan.layers[layer].push_back(cog.id);
    }
    return plan;
}

/// Product of option counts over `cog_subset`; saturates at UINT64_MAX.
template <class Subset>
std::uint64_t space_size(const CogCatalog& catalog, const Subset& cog_subset)
{
    std::uint64_t total = 1;
    for (const auto& id : cog_subset) {
        const std::uint64_t m = catalog.at(id).options.size();
        if (m != 0 && total > std::numeric_limits<std::uint64_t>::max() / m)
            return std::numeric_limits<std::uint64_t>::max();
        total *= m;
    }
    return total;
}

inline std::uint64_t space_size(const CogCatalog& catalog) { return space_size(catalog, catalog.ids()); }

/// Decodes a mixed-radix index (catalog cog order, last cog fastest) into a
/// full configuration.
inline Configuration configuration_at(const CogCatalog& catalog, std::uint64_t index)
{
    Configuration c;
    c.catalog_version = catalog.version();
    const auto& cogs = catalog.cogs();
    for (std::size_t i = cogs.size(); i-- > 0;) {
        const std::uint64_t m = cogs[i].options.size();
        c.assignments[cogs[i].id] = cogs[i].options[index % m].id;
        index /= m;
    }
    return c;
}

inline json configuration_to_json(const Configuration& c)
{
    json out = json::object();
    for (const auto& [k, v] : c.assignments)
        out[k] = v;
    return out;
}

inline Configuration configuration_from_json(const json& j, std::int64_t version = 0)
{
    if (!j.is_object())
        throw SchemaError("assignments must be an object");
    Configuration c;
    c.catalog_version = version;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw SchemaError("assignment for '" + it.key() + "' must be a string");
        c.assignments[it.key()] = it.value().get<std::string>();
    }
    return c;
}

} // namespace adaseek

#endif
