#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace probekit {

/// Number of workers for `jobs` (0 = hardware concurrency).
inline std::size_t resolve_jobs(std::size_t jobs) {
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    return jobs;
}

/// Calls fn(i) for every i in [0, n) on up to `jobs` threads. fn must not throw
/// and must write only to slots owned by i, so the outcome is schedule independent.
template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F&& fn) {
    const std::size_t workers = std::min(resolve_jobs(jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
}

}  // namespace probekit
