#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace vac {

inline unsigned hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Run fn(begin, end) over contiguous index blocks on the available threads.
// Deterministic partition; caller must make writes disjoint per index.
template <typename Fn>
void parallel_for_blocks(Eigen::Index total, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = hardware_threads();
    if (threads <= 1 || total < 4096) {
        fn(Eigen::Index{0}, total);
        return;
    }
    Eigen::Index chunk = (total + static_cast<Eigen::Index>(threads) - 1) /
                         static_cast<Eigen::Index>(threads);
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < threads; ++t) {
        Eigen::Index b = static_cast<Eigen::Index>(t) * chunk;
        Eigen::Index e = std::min(total, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed) std::rethrow_exception(error);
}

// Run fn(i) for i in [0, count) on a worker pool, pulling indices from a
// shared counter. Results must be written to disjoint slots.
template <typename Fn>
void parallel_for_each(Eigen::Index count, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = std::min<unsigned>(hardware_threads(), static_cast<unsigned>(count));
    if (threads <= 1) {
        for (Eigen::Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<Eigen::Index> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                Eigen::Index i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failed) std::rethrow_exception(error);
}

}  // namespace vac
