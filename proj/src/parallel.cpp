#include "fracjac/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace fracjac {

namespace {

std::size_t initial_workers()
{
    if (const char* env = std::getenv("FRACJAC_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::atomic<std::size_t>& worker_setting()
{
    static std::atomic<std::size_t> workers{initial_workers()};
    return workers;
}

}  // namespace

std::size_t default_workers() { return worker_setting().load(); }

void set_default_workers(std::size_t workers)
{
    worker_setting().store(std::max<std::size_t>(1, workers));
}

void parallel_for_blocks(std::size_t count,
                         const std::function<void(std::size_t, std::size_t)>& body,
                         std::size_t workers)
{
    if (count == 0) return;
    if (workers == 0) workers = default_workers();
    workers = std::min(workers, count);
    if (workers <= 1) {
        body(0, count);
        return;
    }

    // More blocks than threads so uneven rows (triangular pair sums) balance.
    const std::size_t blocks = std::min(count, workers * 8);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            const std::size_t begin = count * b / blocks;
            const std::size_t end = count * (b + 1) / blocks;
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    {
        std::vector<std::jthread> threads;
        threads.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(run);
        run();
    }
    if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 16) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double parallel_sum(std::size_t count, const std::function<double(std::size_t)>& f,
                    std::size_t workers)
{
    std::vector<double> terms(count, 0.0);
    parallel_for_blocks(
        count,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) terms[i] = f(i);
        },
        workers);
    return pairwise_sum(terms);
}

}  // namespace fracjac
