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

#ifndef ADASEEK_HYPERVOLUME_HPP
#define ADASEEK_HYPERVOLUME_HPP

// Dominated hypervolume for up to three objectives. Quality is maximized,
// cost and latency minimized; the reference point sits at quality 0 and 1.1x
// the largest cost and latency seen across everything being compared.

#include <algorithm>
#include <span>
#include <vector>

#include "errors.hpp"
#include "objectives.hpp"

namespace adaseek {

inline constexpr double kReferenceMargin = 1.1;

/// Reference point over a set of archives.
inline MetricVector reference_point(std::span<const ResultArchive* const> archives)
{
    MetricVector ref{0.0, 0.0, 0.0};
    for (const auto* a : archives)
        for (const auto& o : a->observations()) {
            ref.cost = std::max(ref.cost, o.metrics.cost * kReferenceMargin);
            ref.latency = std::max(ref.latency, o.metrics.latency * kReferenceMargin);
        }
    return ref;
}

namespace detail {

/// Points in a maximize-everything frame relative to the reference, with
/// non-positive coordinates dropped.
inline std::vector<std::vector<double>> to_gain_frame(std::span<const MetricVector> points,
                                                      std::span<const Metric> objectives, const MetricVector& ref)
{
    std::vector<std::vector<double>> out;
    for (const auto& p : points) {
        std::vector<double> g;
        bool inside = true;
        for (Metric m : objectives) {
            const double d = maximized(m) ? p.get(m) - ref.get(m) : ref.get(m) - p.get(m);
            if (!(d > 0.0))
                inside = false;
            g.push_back(d);
        }
        if (inside)
            out.push_back(std::move(g));
    }
    return out;
}

inline double area_2d(std::vector<std::pair<double, double>> pts)
{
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double area = 0.0, best_y = 0.0;
    for (const auto& [x, y] : pts) {
        if (y > best_y) {
            area += x * (y - best_y);
            best_y = y;
        }
    }
    return area;
}

} // namespace detail

/// Exact hypervolume: sweep in 2D, slicing along the last axis in 3D.
inline double hypervolume(std::span<const MetricVector> points, std::span<const Metric> objectives,
                          const MetricVector& ref)
{
    if (objectives.empty() || objectives.size() > 3)
        throw ArgumentError("hypervolume supports 1 to 3 objectives");
    const auto g = detail::to_gain_frame(points, objectives, ref);
    if (g.empty())
        return 0.0;
    if (objectives.size() == 1) {
        double best = 0.0;
        for (const auto& p : g)
            best = std::max(best, p[0]);
        return best;
    }
    if (objectives.size() == 2) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : g)
            pts.emplace_back(p[0], p[1]);
        return detail::area_2d(std::move(pts));
    }
    std::vector<double> levels;
    for (const auto& p : g)
        levels.push_back(p[2]);
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    double volume = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double lower = i + 1 < levels.size() ? levels[i + 1] : 0.0;
        std::vector<std::pair<double, double>> slice;
        for (const auto& p : g)
            if (p[2] >= levels[i])
                slice.emplace_back(p[0], p[1]);
        volume += detail::area_2d(std::move(slice)) * (levels[i] - lower);
    }
    return volume;
}

inline double frontier_hypervolume(std::span<const Observation> frontier, const EvaluatorSpec& spec,
                                   const MetricVector& ref)
{
    std::vector<MetricVector> pts;
    for (const auto& o : frontier)
        pts.push_back(o.metrics);
    return hypervolume(pts, spec.objectives, ref);
}

} // namespace adaseek

#endif
