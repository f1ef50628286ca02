#include "interlock/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace interlock {

void parallel_chunks(std::size_t count, int jobs,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (count == 0) return;
    int threads = std::clamp<int>(jobs, 1, int(std::min<std::size_t>(count, 1u << 10)));
    if (threads <= 1) {
        fn(0, count);
        return;
    }
    std::size_t chunk = (count + std::size_t(threads) - 1) / std::size_t(threads);
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (int t = 0; t < threads; ++t) {
        std::size_t lo = std::size_t(t) * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace interlock
