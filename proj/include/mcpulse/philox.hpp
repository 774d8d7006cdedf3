#pragma once

#include <array>
#include <cstdint>

namespace mcpulse {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each
/// (key, counter) pair maps to four independent 32-bit words, so any
/// particle/step can be drawn without touching shared state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

/// Uniform in (0, 1) from 32 random bits; never returns 0 or 1.
inline double uint32_to_open_unit(std::uint32_t x) {
  return (static_cast<double>(x) + 0.5) * 0x1.0p-32;
}

}  // namespace mcpulse
