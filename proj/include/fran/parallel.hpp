// Index-parallel map with results in index order.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace fran {

/// Worker count: hardware concurrency, at least 1, at most `n`.
inline std::size_t worker_count(std::size_t n)
{
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(hw, n));
}

/// out[i] = fn(i) for i in [0, n). The first exception by index is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<std::invoke_result_t<Fn, std::size_t>>
{
    using R = std::invoke_result_t<Fn, std::size_t>;
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = worker_count(n);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace fran
