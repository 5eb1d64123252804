#pragma once

#include <cstddef>
#include <functional>

namespace membrane::parallel {

// Worker cap from MEMBRANE_THREADS (>= 1); defaults to 1 when unset or invalid.
int worker_count();

// Overrides MEMBRANE_THREADS for this process; 0 restores the environment value.
void set_worker_count(int n);

// Splits [0, n) into `chunks` contiguous ranges (chunk c covers
// [c*n/chunks, (c+1)*n/chunks)) and runs body(c, begin, end) on up to
// worker_count() threads. Chunk boundaries do not depend on the thread count,
// so callers that merge per-chunk results in chunk order are deterministic.
void for_chunks(std::size_t n, std::size_t chunks,
                const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

// Runs body(i) for i in [0, n) on up to worker_count() threads.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace membrane::parallel
