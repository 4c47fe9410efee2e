#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace nframes {

// Worker count: hardware concurrency, capped by the NFRAMES_THREADS variable.
inline int thread_count()
{
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("NFRAMES_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

// Chunked parallel loop over [begin, end). Falls back to serial for small
// ranges so that per-node kernels stay cheap to call.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn)
{
    const std::size_t count = end > begin ? end - begin : 0;
    const int workers = thread_count();
    if (workers <= 1 || count < 2048) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([lo, hi, &fn, &first_error, &error_mutex] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace nframes
