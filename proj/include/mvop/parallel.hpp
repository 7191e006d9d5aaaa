#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

namespace mvop {

/// Worker cap: MVOP_THREADS when set to a positive integer, else the hardware concurrency.
inline int max_threads() {
    if (const char* env = std::getenv("MVOP_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to max_threads() workers. The first
/// exception thrown by any task is rethrown after all workers finish.
template <class Fn>
void parallel_for(int count, Fn fn) {
    const int workers = std::min(max_threads(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> tasks;
    tasks.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&] {
            try {
                for (int i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                next = count;
                throw;
            }
        }));
    }
    std::exception_ptr first;
    for (auto& t : tasks) {
        try {
            t.get();
        } catch (...) {
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace mvop
