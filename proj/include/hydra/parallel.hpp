#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hydra {

inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs != 0) return jobs;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(worker, i) for i in [0, n) on up to `jobs` threads; `worker` is in
/// [0, worker_count(n, jobs)). The first exception thrown by any task is
/// rethrown after all workers stop.
inline unsigned worker_count(std::size_t n, unsigned jobs) {
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(resolve_jobs(jobs), n)));
}

template <class Fn>
void parallel_for_workers(std::size_t n, unsigned jobs, Fn&& fn) {
    unsigned workers = worker_count(n, jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(0u, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&](unsigned worker) {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(worker, i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    parallel_for_workers(n, jobs, [&](unsigned, std::size_t i) { fn(i); });
}

}  // namespace hydra
