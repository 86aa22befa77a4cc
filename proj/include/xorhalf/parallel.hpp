#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace xorhalf {

/// Worker count: XORHALF_THREADS if set (>= 1), otherwise hardware concurrency.
std::size_t thread_budget();

/// Runs body(i) for i in [0, count). Work items must write only to their own
/// slot; results are therefore independent of the schedule. The first
/// exception thrown by any item is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t threads = thread_budget()) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    threads = std::min(threads, count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace xorhalf
