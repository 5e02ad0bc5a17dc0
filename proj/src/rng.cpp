#include "tpca/rng.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tpca {

int effective_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TPCA_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(int count, const std::function<void(int)>& fn, int threads) {
    const int nw = std::min(effective_threads(threads), std::max(count, 1));
    if (nw <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tpca
