#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace rsde {

/// Philox4x32-10 (Salmon et al., SC'11). Counter-based: the output depends
/// only on (counter, key), so any path can be drawn in any order.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Block generate(Block ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }
};

/// Standard normal pairs addressed by (seed, stream, path, step).
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed, std::uint32_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

    std::pair<double, double> pair(std::uint64_t path, std::uint32_t step) const noexcept {
        const auto b = Philox4x32::generate(
            {step, stream_, static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)}, key_);
        const double u1 = unit(b[0], b[1]);
        const double u2 = unit(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    double normal(std::uint64_t path, std::uint32_t step) const noexcept { return pair(path, step).first; }

private:
    // 53 random bits mapped into (0, 1)
    static double unit(std::uint32_t hi, std::uint32_t lo) noexcept {
        const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
};

}  // namespace rsde
