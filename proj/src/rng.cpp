#include "qfisher/rng.hpp"

#include <cmath>

namespace qfisher {

namespace {

constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kKeyBump = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

std::array<std::uint64_t, 2> Philox2x64::block(std::uint64_t counter) const noexcept {
    std::uint64_t x0 = counter;
    std::uint64_t x1 = stream_;
    std::uint64_t key = key_;
    for (int round = 0; round < 10; ++round) {
        const auto product = static_cast<unsigned __int128>(kMultiplier) * x0;
        const auto hi = static_cast<std::uint64_t>(product >> 64);
        const auto lo = static_cast<std::uint64_t>(product);
        x0 = hi ^ key ^ x1;
        x1 = lo;
        key += kKeyBump;
    }
    return {x0, x1};
}

Philox2x64::result_type Philox2x64::operator()() noexcept {
    if (cursor_ == 2) {
        buffer_ = block(counter_++);
        cursor_ = 0;
    }
    return buffer_[static_cast<std::size_t>(cursor_++)];
}

double uniform_unit(Philox2x64 &gen) noexcept {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double standard_normal(Philox2x64 &gen) noexcept {
    const double u1 = 1.0 - uniform_unit(gen); // (0, 1], keeps the log finite
    const double u2 = uniform_unit(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

} // namespace qfisher
