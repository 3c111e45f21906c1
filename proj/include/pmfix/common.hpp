#ifndef PMFIX_COMMON_HPP
#define PMFIX_COMMON_HPP

#include <Eigen/Core>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace pmfix {

using Point = Eigen::VectorXd;

inline Point point1(double x) {
    Point p(1);
    p[0] = x;
    return p;
}

inline Point point2(double x, double y) {
    Point p(2);
    p[0] = x;
    p[1] = y;
    return p;
}

/// Shortest round-trip decimal form of a double, suitable for CSV cells.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Worker count for data-parallel loops. PMFIX_THREADS caps it; 0 or unset
/// means hardware concurrency.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PMFIX_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<unsigned>(n);
    }
    return hw;
}

/// Runs fn(begin, end, chunk_index) over static index chunks. Chunking is a
/// pure function of n and the worker count, so results merged in chunk order
/// are reproducible.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
    unsigned workers = worker_count();
    if (n == 0) return;
    std::size_t chunk = (n + workers - 1) / workers;
    if (workers <= 1 || n < 2 * chunk) {
        fn(std::size_t{0}, n, 0u);
        return;
    }
    std::vector<std::thread> pool;
    unsigned idx = 0;
    for (std::size_t begin = 0; begin < n; begin += chunk, ++idx) {
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, begin, end, idx] { fn(begin, end, idx); });
    }
    for (auto& t : pool) t.join();
}

/// Deterministic index sampler (same sequence on every platform: raw
/// mt19937_64 output reduced by modulo, never a distribution object).
class IndexSampler {
public:
    explicit IndexSampler(std::uint64_t seed) : rng_(seed) {}

    std::size_t next(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

    double next_unit() {
        // 53 uniform bits in [0, 1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace pmfix

#endif
