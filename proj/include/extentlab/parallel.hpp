#pragma once

#include <cstddef>
#include <functional>

namespace extentlab
{

/// Worker cap: EXTENTLAB_THREADS when set to a positive integer, else hardware concurrency.
std::size_t thread_count();

/**
 * Runs body(i) for i in [0, count) on up to thread_count() workers. Each
 * index is handled exactly once; callers write results into slot i, so the
 * outcome is independent of scheduling. The first exception is rethrown.
 */
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body);

} // namespace extentlab
