#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace qot {

/// splitmix64-style mixing, used to derive independent session seeds
/// from a master seed so that parallel execution order cannot affect
/// results.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-session random source. All sampling goes through
/// explicit integer arithmetic so results are reproducible bit-for-bit
/// across runs and worker counts.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng for_session(std::uint64_t master_seed, std::uint64_t session_index,
                           std::uint64_t attempt = 0) {
        return Rng(mix_seed(mix_seed(master_seed, session_index), attempt));
    }

    std::uint64_t raw() { return engine_(); }

    int bit() { return static_cast<int>(engine_() & 1ULL); }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) without modulo bias.
    std::size_t below(std::size_t n) {
        if (n == 0) {
            throw std::invalid_argument("Rng::below(0)");
        }
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    /// k distinct values sampled uniformly from {0, ..., n-1}, ascending.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) {
            throw std::invalid_argument("sample_without_replacement: k > n");
        }
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) {
            pool[i] = i;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + below(n - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    /// k distinct elements from the given pool, in ascending pool order.
    std::vector<std::size_t> sample_subset(const std::vector<std::size_t> &pool, std::size_t k) {
        const std::vector<std::size_t> idx = sample_without_replacement(pool.size(), k);
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i : idx) {
            out.push_back(pool[i]);
        }
        return out;
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace qot
