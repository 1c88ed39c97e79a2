// Minimal blocked parallel-for over trajectory indices. Worker count comes
// from PKF_THREADS when set, otherwise the hardware concurrency. Results must
// be written to disjoint slots (or merged per-shard) so the output is
// independent of the thread schedule.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pkf {

inline int worker_count() {
    if (const char* env = std::getenv("PKF_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(begin, end) on contiguous chunks of [0, n) across workers.
template <typename F>
void parallel_for_chunks(long n, F&& fn, int workers = worker_count()) {
    if (n <= 0) return;
    workers = static_cast<int>(std::max<long>(1, std::min<long>(workers, n)));
    if (workers == 1) {
        fn(0L, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long lo = w * chunk;
        const long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

/// Runs fn(i) for every i in [0, n).
template <typename F>
void parallel_for(long n, F&& fn, int workers = worker_count()) {
    parallel_for_chunks(
        n,
        [&fn](long lo, long hi) {
            for (long i = lo; i < hi; ++i) fn(i);
        },
        workers);
}

}  // namespace pkf
