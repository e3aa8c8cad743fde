#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace raf {

// Runs fn(i) for i in [0, n). With workers > 1 the index range is split
// into contiguous blocks, one thread per block. fn must only write to
// per-index slots; results are then independent of the worker count.
template <class Fn>
void parallel_for(std::uint64_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned w = workers;
    if (static_cast<std::uint64_t>(w) > n) w = static_cast<unsigned>(n);
    std::vector<std::thread> threads;
    threads.reserve(w);
    std::uint64_t chunk = (n + w - 1) / w;
    for (unsigned b = 0; b < w; ++b) {
        std::uint64_t lo = static_cast<std::uint64_t>(b) * chunk;
        std::uint64_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        threads.emplace_back([lo, hi, &fn] {
            for (std::uint64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

} // namespace raf
