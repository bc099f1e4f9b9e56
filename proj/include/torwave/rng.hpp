#pragma once

#include <array>
#include <cstdint>

namespace torwave::rng {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;
using PhiloxBlock = std::array<std::uint64_t, 4>;

/// Philox4x64 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure function of (counter, key).
PhiloxBlock philox4x64_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Maps the top 52 bits of a word to the open interval (0, 1).
inline double to_open_unit(std::uint64_t word) noexcept
{
    return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

/*!
 * Stateless random stream addressed by (master seed, stream tag, trial).
 *
 * Each trial owns an independent sequence of 256-bit blocks; block b of
 * trial i is philox(counter = {i, b, 0, 0}, key = {seed, tag}). Nothing is
 * shared between trials, so draws do not depend on evaluation order.
 */
class TrialStream {
  public:
    TrialStream(std::uint64_t master_seed, std::uint64_t stream_tag, std::uint64_t trial) noexcept
        : key_{master_seed, stream_tag}, trial_(trial)
    {
    }

    PhiloxBlock block(std::uint64_t index) const noexcept
    {
        return philox4x64_10({trial_, index, 0, 0}, key_);
    }

    /// Word `i` of the flattened block sequence.
    std::uint64_t word(std::uint64_t i) const noexcept { return block(i / 4)[i % 4]; }

  private:
    PhiloxKey key_;
    std::uint64_t trial_;
};

}  // namespace torwave::rng
