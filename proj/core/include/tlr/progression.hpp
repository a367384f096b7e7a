/*
 * Copyright (C) 2026 The tlretrieve Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>

#include "tlr/formula.hpp"

namespace tlr {

/// Residual obligation after consuming one trace step labelled `labels`.
///
/// Finite-trace semantics with strong next. The result is always simplified
/// (see `simplify`), so it can be used directly as a memo key.
Formula progress(const Formula& f, LabelSet labels);

/// Truth of `f` on the empty continuation (end of trace): unfulfilled
/// X / F / U are false, G is vacuously true.
bool final_eval(const Formula& f);

/// Iterated progression over `trace` followed by `final_eval`.
bool accepts(const Formula& f, std::span<const LabelSet> trace);

/// Direct recursive finite-trace semantics of `f` on the suffix of `trace`
/// starting at `pos`, where `pos == trace.size()` is the empty suffix.
/// Independent of progression; the brute-force checker is built on it.
bool holds(const Formula& f, std::span<const LabelSet> trace, std::size_t pos = 0);

} // namespace tlr
