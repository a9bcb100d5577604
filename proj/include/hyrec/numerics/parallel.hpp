#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hyrec::num {

/// Worker cap: HYREC_THREADS if set and positive, else hardware concurrency.
inline std::size_t max_threads() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("HYREC_THREADS")) {
            try {
                auto v = std::stol(env);
                if (v > 0) return static_cast<std::size_t>(v);
            } catch (...) {
            }
        }
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }();
    return cap;
}

/// Runs fn(begin, end) over disjoint chunks of [0, n). Each chunk writes only
/// its own outputs, so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, std::size_t work_per_item, Fn&& fn) {
    constexpr std::size_t kMinWork = 1 << 16;
    std::size_t threads = std::min(max_threads(), n);
    if (threads > 1 && n * work_per_item < kMinWork * threads) threads = std::max<std::size_t>(1, n * work_per_item / kMinWork);
    if (threads <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 1; t < threads; ++t) {
        std::size_t b = t * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    fn(std::size_t{0}, std::min(n, chunk));
    for (auto& th : pool) th.join();
}

}  // namespace hyrec::num
