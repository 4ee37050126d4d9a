#pragma once

#include <array>
#include <cstdint>

namespace risfas {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The generator is a pure function of (key, counter), which is what makes
// Monte Carlo runs reproducible under any partitioning of the trial range:
// every trial owns the substream keyed by (seed, stream_id) and consumes
// counters 0,1,2,... within it. No state is shared between substreams.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    // Generate the 128-bit block for counter index `n` of this stream.
    Block block(std::uint64_t n) const;

private:
    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
};

// Sequential view over one Philox substream: uniforms in (0,1) and standard
// normals (Box-Muller). Determinism holds per (seed, stream) regardless of
// which thread owns the object.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    double next_uniform();        // strictly inside (0,1)
    double next_normal();
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint32_t next_u32();

    Philox4x32 gen_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    Philox4x32::Block buf_{};
    int buf_pos_ = 4;             // force refill on first use
    double spare_normal_ = 0.0;
    bool have_spare_ = false;
};

// SplitMix64 step; used to derive per-point / per-role substream ids.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

} // namespace risfas
