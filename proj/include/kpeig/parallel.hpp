#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace kpeig {

/// Worker cap: KP_THREADS when set (floored at 1), hardware concurrency
/// otherwise.
inline unsigned worker_count() {
    if (const char* env = std::getenv("KP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return unsigned(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs fn(i) for i in [0, count), statically partitioned over workers.
/// Callers store results into per-index slots, so the aggregate is
/// deterministic regardless of scheduling.
template <typename Fn>
void parallel_for_index(std::size_t count, Fn&& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), count ? count : 1);
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace kpeig
