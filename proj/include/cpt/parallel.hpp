#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cpt {

/// Runs fn(0), ..., fn(count - 1), each exactly once, on up to `threads`
/// workers. Callers write results into per-index slots, so the outcome is
/// identical for every thread count and schedule. The first exception thrown
/// by any index is rethrown on the calling thread after all workers stop.
template <typename Fn>
void parallel_for(int threads, int count, Fn&& fn) {
    if (count <= 0) {
        return;
    }
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto run = [&]() {
        for (;;) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count || failed.load(std::memory_order_relaxed)) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(run);
    }
    for (std::thread& worker : pool) {
        worker.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace cpt
