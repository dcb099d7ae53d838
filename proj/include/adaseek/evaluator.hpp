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

#ifndef ADASEEK_EVALUATOR_HPP
#define ADASEEK_EVALUATOR_HPP

#include <cstdint>
#include <functional>
#include <utility>

#include "cogspace.hpp"
#include "objectives.hpp"

namespace adaseek {

/// Workflow evaluator. evaluate() must be safe to call concurrently.
class Evaluator {
public:
    virtual ~Evaluator() = default;

    /// `nonce` identifies the call site deterministically; noisy evaluators
    /// seed their noise from it.
    virtual MetricVector evaluate(const Configuration& config, std::uint64_t nonce) const = 0;

    /// Runs between chunks with exclusive access; may grow dynamic cogs.
    virtual void on_chunk_boundary(CogCatalog& /*catalog*/, const ResultArchive& /*archive*/) {}

    /// Called once the catalog is final for a resumed run, before any
    /// evaluation, so evaluators can rebuild state for grown option lists.
    virtual void sync(const CogCatalog& /*catalog*/) {}
};

class FunctionEvaluator final : public Evaluator {
public:
    using Fn = std::function<MetricVector(const Configuration&)>;
    explicit FunctionEvaluator(Fn fn) : fn_(std::move(fn)) {}

    MetricVector evaluate(const Configuration& config, std::uint64_t) const override { return fn_(config); }

private:
    Fn fn_;
};

} // namespace adaseek

#endif
