#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace tenc {

/// Worker count: TENC_THREADS if set and positive, otherwise the hardware
/// concurrency. Thread count only changes speed, never results; work is
/// split into a chunk grid that depends on the problem size alone.
inline unsigned thread_count() {
    if (const char* env = std::getenv("TENC_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs body(begin, end) over [0, n) in fixed-size chunks pulled by a small
/// thread pool. The chunk grid is a function of n and chunk_size only, so any
/// per-chunk outputs (and any reduction done afterwards in chunk order) are
/// identical no matter how many threads run.
inline void parallel_chunks(std::size_t n, std::size_t chunk_size,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    unsigned workers = thread_count();
    if (workers <= 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    pool.reserve(spawn);
    for (unsigned t = 1; t < spawn; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

/// parallel_chunks with an element-wise body and a default chunk size.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         std::size_t chunk_size = 64) {
    parallel_chunks(n, chunk_size, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

}  // namespace tenc
