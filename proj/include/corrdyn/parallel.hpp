#pragma once
// Deterministic data parallelism: a static block partition over std::thread.
//
// Every parallel loop in the library writes to preassigned output slots, so
// results are identical for any thread count. The global thread cap is set
// once by the CLI (or a test) and read everywhere else.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace corrdyn {

inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0}; // 0 means "use hardware_concurrency"
    return cap;
}

inline void set_thread_count(unsigned n) { thread_cap().store(n); }

inline unsigned effective_threads() {
    unsigned n = thread_cap().load();
    if (n == 0) n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// body(i) is called exactly once for each i in [0, n); iterations must only
// touch state owned by index i. The first exception thrown by any worker is
// rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    const unsigned t = effective_threads();
    if (t <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(t, n));
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace corrdyn
