#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace cumsig {

// Runs fn(i) for every i in [0, n) across up to `threads` workers
// (0 = hardware concurrency), splitting the index range contiguously.
// fn must be safe to call concurrently for distinct i; the first exception
// raised is rethrown after all workers join.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
    std::size_t workers =
        threads > 0 ? static_cast<std::size_t>(threads)
                    : static_cast<std::size_t>(
                          std::thread::hardware_concurrency());
    workers = std::clamp<std::size_t>(workers, 1, n > 0 ? n : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&fn, &errors, lo, hi, w] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace cumsig
