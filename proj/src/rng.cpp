#include "fedsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer (Steele/Lea/Flood); bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t absorb(std::uint64_t state, std::uint64_t word) {
    return mix64(state ^ (word + kGolden + (state << 6) + (state >> 2)));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) { return absorb(seed, tag); }

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t round, std::uint64_t client,
                       std::uint64_t step, std::uint64_t lane) {
    std::uint64_t k = mix64(seed + kGolden);
    k = absorb(k, round);
    k = absorb(k, client);
    k = absorb(k, step);
    k = absorb(k, lane);
    key_ = k;
}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::next_double() {
    // 53 high bits -> [0, 1).
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::next_below(std::uint64_t bound) {
    if (bound == 0) throw ParameterError("next_below: bound must be positive");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % bound;
}

double CounterRng::next_gaussian() {
    if (has_cached_gaussian_) {
        has_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_gaussian_ = r * std::sin(theta);
    has_cached_gaussian_ = true;
    return r * std::cos(theta);
}

CounterRng make_stream(std::uint64_t seed, std::uint64_t round, std::uint64_t client,
                       std::uint64_t step, RngLane lane) {
    return CounterRng(seed, round, client, step, static_cast<std::uint64_t>(lane));
}

std::vector<int> sample_without_replacement(int n, int k, CounterRng& rng) {
    if (k < 0 || k > n) throw ParameterError("sample_without_replacement: need 0 <= k <= n");
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

void shuffle(std::vector<int>& items, CounterRng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace fedsim
