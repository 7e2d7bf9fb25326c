#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace simstudy::stats {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection
/// on 128-bit counters.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Counter-based generator: the 64-bit seed is the Philox key and output
/// block i is philox(i, key). Identical seeds give identical streams on
/// every platform. Satisfies UniformRandomBitGenerator, but use the member
/// samplers (not <random> distributions) when results must be portable.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    std::uint64_t seed() const noexcept { return seed_; }

    result_type operator()() noexcept { return next_u64(); }
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;
    /// Uniform integer in [0, n), unbiased (Lemire). n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Standard normal via the Marsaglia polar method (pairs, one cached).
    double normal() noexcept;

    /// Fisher–Yates.
    template <class T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Seed of the `counter`-th replication run by `worker_id` under
/// `master_seed`. Injective in `counter` for a fixed (master, worker), and
/// pseudo-random across workers.
std::uint64_t replication_seed(std::uint64_t master_seed, std::string_view worker_id, std::uint64_t counter) noexcept;

/// Seed for a worker's scheduling stream (config draws), independent of
/// its replication seeds.
std::uint64_t scheduler_seed(std::uint64_t master_seed, std::string_view worker_id) noexcept;

}  // namespace simstudy::stats
