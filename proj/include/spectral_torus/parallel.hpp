// parallel.hpp - index-parallel map with deterministic collection order.
#pragma once

#include <cstdlib>
#include <future>
#include <thread>
#include <vector>

namespace spectral_torus {

inline unsigned max_threads() {
    if (const char* env = std::getenv("SPECTRAL_TORUS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(0..count-1); exceptions from workers are rethrown in index order.
template <class Fn>
void parallel_for(size_t count, const Fn& fn) {
    unsigned nthreads = std::min<size_t>(max_threads(), count);
    if (nthreads <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(count);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex mtx;
    auto guarded = [&]() {
        try {
            worker();
        } catch (...) {
            std::lock_guard<std::mutex> lk(mtx);
            if (!first_error) first_error = std::current_exception();
        }
    };
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(guarded);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spectral_torus
