#pragma once

#include <cstdint>

namespace cohsim {

// Counter-based random stream, splittable by index. The normative
// derivation rule for per-trajectory streams is
//     base = master_seed XOR stream_index
// and draw k of a stream is the splitmix64 finalizer applied to
// base + (k+1)*0x9E3779B97F4A7C15. Streams are reproducible across
// platforms and independent of how work is divided between threads.
class RandomStream {
  public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : base_(master_seed ^ stream_index) {}

    std::uint64_t next_u64() {
        std::uint64_t z = base_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53 random bits
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace cohsim
