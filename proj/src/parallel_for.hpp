#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace specsim::detail {

inline int worker_count() {
    if (const char* env = std::getenv("SPECSIM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw > 8 ? 8 : hw) : 1;
}

/// Run body(0..count-1) across workers. Bodies must write only to their own
/// index's slot so results stay identical for any worker count.
inline void parallel_for(long count, const std::function<void(long)>& body) {
    const long workers = std::min<long>(worker_count(), count);
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (long w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            long i;
            while (!stop.load(std::memory_order_relaxed) &&
                   (i = next.fetch_add(1)) < count) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    stop.store(true, std::memory_order_relaxed);
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace specsim::detail
