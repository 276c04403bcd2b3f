#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace monk::detail {

inline std::size_t worker_count(std::size_t work_items)
{
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    return std::min(hw, work_items);
}

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads with
// dynamic scheduling. Each index must write only its own output slots, so the
// result does not depend on the schedule. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t min_parallel = 2)
{
    const std::size_t workers = worker_count(count);
    if (workers <= 1 || count < min_parallel) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(run);
    }
    run();
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace monk::detail
