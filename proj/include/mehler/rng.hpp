#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mehler {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The key holds the run seed; counter words 2 and 3 name the replica and
/// the driver, so every (replica, driver) pair owns an independent stream
/// whose output does not depend on how replicas are scheduled.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint32_t replica, std::uint32_t driver) noexcept;

    /// One application of the 10-round bijection.
    static Counter block(Counter ctr, Key key) noexcept;

    result_type operator()() noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

private:
    Key key_;
    Counter ctr_;
    Counter out_{};
    unsigned used_ = 4;
};

/// Uniform double in (0, 1) with 53 random bits.
double uniform_open(Philox4x32& gen) noexcept;

}  // namespace mehler
