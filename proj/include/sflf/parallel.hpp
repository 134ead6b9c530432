// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_PARALLEL_HPP
#define SFLF_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sflf {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(worker, index) for every index in [0, count), handing indices out
// dynamically. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn &&fn) {
    threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(count, 1)));
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&](unsigned id) {
        try {
            for (std::uint64_t i = next++; i < count && !failed; i = next++) fn(id, i);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
        }
    };

    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace sflf

#endif  // SFLF_PARALLEL_HPP
