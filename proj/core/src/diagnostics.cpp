#include "magspec/diagnostics.hpp"
#include "magspec/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace magspec {

namespace {
std::mutex sink_mutex;
WarningSink current_sink;
std::atomic<long> warnings{0};
} // namespace

void set_warning_sink(WarningSink sink) {
    std::lock_guard lock(sink_mutex);
    current_sink = std::move(sink);
}

void warn(const std::string& message) {
    ++warnings;
    std::lock_guard lock(sink_mutex);
    if (current_sink)
        current_sink(message);
    else
        std::cerr << "magspec warning: " << message << '\n';
}

long warning_count() { return warnings.load(); }

int hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace magspec
