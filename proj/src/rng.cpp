#include "risfas/rng.hpp"

#include <cmath>

namespace risfas {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over seed + odd-multiplied salt
    std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key0_(static_cast<std::uint32_t>(seed)),
      key1_(static_cast<std::uint32_t>(seed >> 32)),
      stream_lo_(static_cast<std::uint32_t>(stream)),
      stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

Philox4x32::Block Philox4x32::block(std::uint64_t n) const {
    Block ctr = {static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                 stream_lo_, stream_hi_};
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : gen_(seed, stream), seed_(seed), stream_(stream) {}

std::uint32_t CounterRng::next_u32() {
    if (buf_pos_ >= 4) {
        buf_ = gen_.block(block_index_++);
        buf_pos_ = 0;
    }
    return buf_[buf_pos_++];
}

double CounterRng::next_uniform() {
    const std::uint32_t hi = next_u32();
    const std::uint32_t lo = next_u32();
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    // 53 random bits, offset by half an ulp to stay strictly inside (0,1)
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_normal_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_normal_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

} // namespace risfas
