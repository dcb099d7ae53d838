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

#ifndef ADASEEK_ADASEEK_HPP
#define ADASEEK_ADASEEK_HPP

#include "baselines.hpp"
#include "cogspace.hpp"
#include "driver.hpp"
#include "evaluator.hpp"
#include "hypervolume.hpp"
#include "objectives.hpp"
#include "persist.hpp"
#include "search.hpp"
#include "simflow.hpp"
#include "surrogate.hpp"

#endif
