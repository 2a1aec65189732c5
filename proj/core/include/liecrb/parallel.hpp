#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace liecrb {

using Rng = std::mt19937_64;

/// Independent random stream for item `index` of a seeded computation.
/// Streams depend only on (seed, index), never on scheduling.
Rng make_stream(std::uint64_t seed, std::uint64_t index);

/// Worker count: LIECRB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
/// visited exactly once; callers write results into index-addressed storage
/// and reduce sequentially afterwards, which keeps results independent of
/// the thread count. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace liecrb
