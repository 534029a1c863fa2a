#include "mehler/rng.hpp"

namespace mehler {

namespace {

constexpr std::uint32_t mult0 = 0xD2511F53u;
constexpr std::uint32_t mult1 = 0xCD9E8D57u;
constexpr std::uint32_t weyl0 = 0x9E3779B9u;
constexpr std::uint32_t weyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint32_t replica, std::uint32_t driver) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, 0u, replica, driver} {}

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += weyl0;
            key[1] += weyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(mult0, ctr[0], hi0, lo0);
        mulhilo(mult1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
    if (used_ == 4) {
        out_ = block(ctr_, key_);
        if (++ctr_[0] == 0)
            ++ctr_[1];
        used_ = 0;
    }
    return out_[used_++];
}

double uniform_open(Philox4x32& gen) noexcept {
    const std::uint64_t a = gen() >> 5;
    const std::uint64_t b = gen() >> 6;
    const double u = (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-54;
}

}  // namespace mehler
