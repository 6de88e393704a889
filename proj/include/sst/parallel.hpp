#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace sst {

/// Splits [begin, end) into at most `threads` contiguous chunks and runs
/// fn(chunk_begin, chunk_end) on each. Chunk boundaries depend only on the
/// range and thread count, so callers whose per-element outputs are
/// independent get bit-identical results for any thread count. fn must not
/// throw.
inline void parallel_for(std::size_t begin, std::size_t end, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (end <= begin) return;
    const std::size_t n = end - begin;
    if (threads <= 1 || n < 2) {
        fn(begin, end);
        return;
    }
    const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
        const std::size_t lo = begin + n * i / t;
        const std::size_t hi = begin + n * (i + 1) / t;
        pool.emplace_back([&fn, lo, hi] {
            if (lo < hi) fn(lo, hi);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace sst
