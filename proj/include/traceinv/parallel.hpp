#pragma once

// Deterministic data-parallel loop. Work items are independent and each
// writes only its own output slot, so results are byte-identical for every
// worker count; only wall time changes.

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace traceinv {

template <class Fn>
inline void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (count == 0) return;
    std::size_t workers = std::max(1u, threads);
    workers = std::min<std::size_t>(workers, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace traceinv
