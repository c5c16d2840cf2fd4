#pragma once

#include <cstdint>
#include <random>

namespace arhlab {

// Deterministic substream derivation: (seed, stream) -> independent generator.
// Gaussian variates are produced by Box-Muller on 53-bit uniforms so that the
// byte stream depends only on (seed, stream), not on the standard library.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(mix(seed, stream)) {}

    double uniform() {
        // (0, 1], never exactly 0 so log() below is safe
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double gaussian();

    std::uint64_t raw() { return engine_(); }

  private:
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace arhlab
