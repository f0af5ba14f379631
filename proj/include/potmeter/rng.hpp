#pragma once

#include <array>
#include <cstdint>

namespace potmeter::rng {

// Counter-based Philox4x32-10 generator.  Counter-based so that independent,
// reproducible streams can be carved out of one master seed by stream id
// without any shared mutable state between threads.
struct PhiloxState {
    std::array<std::uint32_t, 4> counter;
    std::array<std::uint32_t, 2> key;
};

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        if (round < 9) {
            key[0] += W0;
            key[1] += W1;
        }
    }
    return ctr;
}

// One independent substream of the master seed.  Draw index occupies the low
// two counter words, the stream id the high two, so streams never collide.
class RandomStream {
  public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(draw_),
                                                  static_cast<std::uint32_t>(draw_ >> 32),
                                                  stream_lo_, stream_hi_};
        ++draw_;
        const std::array<std::uint32_t, 4> block = philox4x32_10(ctr, key_);
        spare_ = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
        have_spare_ = true;
        return (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    }

    // Uniform in [0,1) with the full 53-bit mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t draw_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace potmeter::rng
