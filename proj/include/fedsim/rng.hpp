#pragma once

// Counter-based keyed RNG. Every stream is addressed by
// (seed, round, client, step, lane) and each draw is a pure function of the
// key and a draw counter, so the same coordinates replay the same values no
// matter how many threads evaluate clients or in which order.

#include <cstdint>
#include <vector>

namespace fedsim {

/// Reserved lane tags. Lane 0 is the default (local update steps).
enum class RngLane : std::uint64_t {
    LocalStep = 0,     // gradient sampling during local steps
    ControlPass = 1,   // option I / warm-start extra pass over the data
    Sampling = 2,      // client sampling per round
    DataGen = 3,       // synthetic dataset generation
    Split = 4,         // similarity partitioner
    Output = 5,        // weighted output-iterate draw
};

class CounterRng {
public:
    /// Stream keyed by the full coordinate tuple.
    CounterRng(std::uint64_t seed, std::uint64_t round, std::uint64_t client,
               std::uint64_t step, std::uint64_t lane = 0);

    /// Convenience for non-federated uses (dataset generation etc.).
    explicit CounterRng(std::uint64_t seed) : CounterRng(seed, 0, 0, 0, 0) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double next_double();

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound);

    /// Standard normal via Box-Muller (second value cached on the stream).
    double next_gaussian();

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

CounterRng make_stream(std::uint64_t seed, std::uint64_t round, std::uint64_t client,
                       std::uint64_t step, RngLane lane = RngLane::LocalStep);

/// Stateless 64-bit mix, used to derive sub-seeds from (seed, tag) pairs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

/// k distinct values from {0,...,n-1}, ascending order. Partial Fisher-Yates.
std::vector<int> sample_without_replacement(int n, int k, CounterRng& rng);

/// In-place Fisher-Yates shuffle of an index vector.
void shuffle(std::vector<int>& items, CounterRng& rng);

}  // namespace fedsim
