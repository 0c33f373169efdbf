#pragma once

// Static index sharding over std::thread. Each worker gets one contiguous
// range; callers write results into per-index slots so the merge order never
// depends on the worker count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace orthorand {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Calls fn(begin, end) on `workers` disjoint ranges covering [0, count).
/// The first exception thrown by any worker is rethrown after all have joined.
template <typename F>
void parallel_shards(std::size_t count, int workers, F&& fn) {
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)),
                                                std::max<std::size_t>(count, 1));
    if (w <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    std::exception_ptr first;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t s = 0; s < w; ++s) {
        const std::size_t begin = count * s / w, end = count * (s + 1) / w;
        pool.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!first) first = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace orthorand
