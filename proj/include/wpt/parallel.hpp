// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace wpt {

/// Calls body(i) for i in [0, count) on up to `workers` threads (0 picks the
/// hardware concurrency). Indices are handed out dynamically; the first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

/// Effective worker count for a request (0 -> hardware concurrency, at least 1).
std::size_t resolve_workers(std::size_t requested);

}  // namespace wpt
