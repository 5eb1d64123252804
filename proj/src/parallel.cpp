#include "membrane/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace membrane::parallel {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
    if (const int o = g_override.load(); o > 0) return o;
    const char* env = std::getenv("MEMBRANE_THREADS");
    if (!env) return 1;
    try {
        const int n = std::stoi(env);
        return n >= 1 ? n : 1;
    } catch (...) {
        return 1;
    }
}

void set_worker_count(int n) { g_override.store(n > 0 ? n : 0); }

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void for_chunks(std::size_t n, std::size_t chunks,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    chunks = std::max<std::size_t>(1, std::min(chunks, std::max<std::size_t>(n, 1)));
    for_each_index(chunks, [&](std::size_t c) { body(c, c * n / chunks, (c + 1) * n / chunks); });
}

}  // namespace membrane::parallel
