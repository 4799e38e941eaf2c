#pragma once

// Replica-level parallelism.  Workers pull replica indices from a shared
// counter and write into caller-owned, replica-indexed slots; every random
// draw is addressed by replica index, so results are identical for any
// worker count and any completion order.  Reductions happen afterwards, in
// replica order, on one thread.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace lpplab {

inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

template <class Fn>
void parallel_replicas(std::uint64_t replicas, unsigned workers, Fn&& fn) {
    if (replicas == 0) return;
    if (workers == 0) throw std::invalid_argument("parallel_replicas: worker count must be positive");
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, replicas));

    if (workers == 1) {
        for (std::uint64_t r = 0; r < replicas; ++r) fn(r);
        return;
    }

    // Chunked grabs keep counter contention negligible without affecting
    // results (slots are index-addressed).
    const std::uint64_t grain = std::max<std::uint64_t>(1, replicas / (std::uint64_t(workers) * 64));
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto body = [&]() {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::uint64_t begin = next.fetch_add(grain, std::memory_order_relaxed);
            if (begin >= replicas) return;
            const std::uint64_t end = std::min(begin + grain, replicas);
            try {
                for (std::uint64_t r = begin; r < end; ++r) fn(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) threads.emplace_back(body);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace lpplab
