#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace sobtrace {

// Worker count: SOBTRACE_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(begin, end) over a static partition of [0, n). Chunk boundaries
// depend only on n and the chunk count, never on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// splitmix64 mixing of two words; used to derive per-probe RNG seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace sobtrace
