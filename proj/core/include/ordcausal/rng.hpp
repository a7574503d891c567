#pragma once

#include <cstdint>
#include <vector>

namespace ordcausal {

// splitmix64 stream. Small, fast, and identical on every platform; each
// parallel unit of work gets its own stream derived from (master seed,
// indices), so results do not depend on scheduling or worker count.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derive an independent stream for a work item.
    static Rng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0);

    std::uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform();

    // Standard normal (Box-Muller, pairwise cached).
    double normal();

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi);

    // Index draw from an (unnormalized is not allowed) probability vector.
    int categorical(const std::vector<double>& probs);

    // k distinct values from {0..n-1}, in draw order.
    std::vector<int> sample_without_replacement(int n, int k);

  private:
    std::uint64_t state_;
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

// splitmix64 finalizer; used for seed mixing and config hashing.
std::uint64_t mix64(std::uint64_t z);

}  // namespace ordcausal
