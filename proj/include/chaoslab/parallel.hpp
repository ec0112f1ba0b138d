#pragma once

#include <cstddef>
#include <functional>

namespace chaoslab {

/// Runs body(begin, end) over `workers` contiguous chunks of [0, count).
/// If several chunks throw, the exception from the lowest chunk is rethrown.
void parallel_chunks(std::size_t count, std::size_t workers,
                     const std::function<void(std::size_t begin, std::size_t end)>& body);

/// Runs body(i) for every i in [0, count) on up to `workers` threads. Every
/// index below the first failing one is always executed, so the rethrown
/// exception (the lowest failing index) does not depend on scheduling.
void parallel_indices(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

} // namespace chaoslab
