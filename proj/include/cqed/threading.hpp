#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cqed {

/// Worker count: explicit argument > CQED_SIM_THREADS > hardware concurrency.
inline unsigned default_thread_count() {
    if (const char* env = std::getenv("CQED_SIM_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

inline unsigned& configured_threads() {
    static unsigned n = 0;  // 0 = resolve lazily from env/hardware
    return n;
}

inline void set_thread_count(unsigned n) { configured_threads() = n; }

/// Index-parallel loop with deterministic output: workers pull indices from a
/// shared counter and write results keyed by index, so reduction order never
/// depends on scheduling.
template <class F>
inline void parallel_for(std::size_t n, F&& f, unsigned threads = 0) {
    if (threads == 0) threads = configured_threads();
    if (threads == 0) threads = default_thread_count();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                f(i);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
                return;
            }
        }
    };
    unsigned nt = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failed.load() && err) std::rethrow_exception(err);
}

} // namespace cqed
