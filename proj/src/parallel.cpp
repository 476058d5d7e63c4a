#include "matteforge/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace matteforge {

int worker_count() {
    if (const char* env = std::getenv("MATTEFORGE_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1, int(std::thread::hardware_concurrency()));
}

void parallel_for(size_t n, int workers, const std::function<void(size_t, size_t)>& body) {
    if (n == 0) return;
    const size_t threads = std::min(size_t(std::max(1, workers)), n);
    if (threads == 1) {
        body(0, n);
        return;
    }
    const size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (size_t t = 0; t < threads; ++t) {
        const size_t begin = t * chunk;
        const size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, t, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace matteforge
