#pragma once

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ssmrec {

// Worker cap: SSMREC_THREADS if set, else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("SSMREC_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end, chunk_index) over contiguous chunks of [0, n).
// Callers keep per-chunk accumulators and combine them in chunk order, so
// results do not depend on the worker count.
template <typename Fn>
int parallel_chunks(std::int64_t n, Fn&& fn) {
    int workers = worker_count();
    if (n <= 0) return 0;
    if (workers > n) workers = static_cast<int>(n);
    if (workers == 1) {
        fn(std::int64_t{0}, n, 0);
        return 1;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::int64_t chunk = (n + workers - 1) / workers;
    int used = 0;
    for (int w = 0; w < workers; ++w) {
        std::int64_t begin = w * chunk;
        std::int64_t end = begin + chunk < n ? begin + chunk : n;
        if (begin >= end) break;
        ++used;
        threads.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
    }
    for (auto& t : threads) t.join();
    return used;
}

}  // namespace ssmrec
