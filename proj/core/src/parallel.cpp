#include "gridformer/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gridformer {

int thread_budget() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0)
        hw = 1;
    if (const char* env = std::getenv("GRIDFORMER_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1)
            hw = std::min(hw, cap);
    }
    return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int budget = thread_budget();
    if (budget <= 1 || count < 32) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    const int workers = std::min<std::size_t>(budget, count);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                body(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace gridformer
