#pragma once

#include <array>
#include <cstdint>

namespace gerw {

/// Philox4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so every (trajectory, time) pair owns its own block and
/// results never depend on how trajectories are spread across workers.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * counter[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * counter[2];
            counter = Block{static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                            static_cast<std::uint32_t>(p1),
                            static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                            static_cast<std::uint32_t>(p0)};
        }
        return counter;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// Random stream keyed by a 64-bit seed; (stream, counter) selects the block.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Philox4x32::Block block(std::uint64_t stream, std::uint64_t counter) const noexcept {
        return Philox4x32::generate({static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                                     static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                                    key_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
        const auto b = block(stream, counter);
        const std::uint64_t bits = (static_cast<std::uint64_t>(b[0]) << 32 | b[1]) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

private:
    Philox4x32::Key key_;
};

} // namespace gerw
