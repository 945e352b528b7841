// The waveform-signature feature vector: 20 normalized cumulant magnitudes
// in a fixed documented order.
#pragma once

#include <array>
#include <cstddef>
#include <utility>

namespace cumsig {

// (order n, conjugate count q) pairs, in feature-vector order: all q for
// n = 2, then n = 4, 6, 8, 10.
inline constexpr std::array<std::pair<int, int>, 20> kWsPairs{{
    {2, 0}, {2, 1},
    {4, 0}, {4, 1}, {4, 2},
    {6, 0}, {6, 1}, {6, 2}, {6, 3},
    {8, 0}, {8, 1}, {8, 2}, {8, 3}, {8, 4},
    {10, 0}, {10, 1}, {10, 2}, {10, 3}, {10, 4}, {10, 5},
}};

inline constexpr std::size_t kWsDim = kWsPairs.size();

struct WaveformSignature {
    std::array<double, kWsDim> values{};  // all entries >= 0 (magnitudes)
};

}  // namespace cumsig
