// Modulation alphabets, symbol generation, and rectangular pulse shaping.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cumsig/types.hpp"

namespace cumsig::modem {

enum class ModulationScheme {
    BPSK, QPSK, PSK8, PSK16,
    PAM4, PAM8, PAM16,
    QAM4, QAM8, QAM16, QAM32, QAM64, QAM128, QAM256,
};

inline constexpr int kSchemeCount = 14;

// All 14 schemes in canonical order.
const std::vector<ModulationScheme>& all_schemes();

// Serialized labels: "BPSK", "8PSK", "16QAM", ...
std::string_view to_label(ModulationScheme scheme);
std::optional<ModulationScheme> scheme_from_label(std::string_view label);

struct ConstellationSet {
    ModulationScheme scheme;
    cvec points;  // unit average power, negation-symmetric
};

struct SymbolBlock {
    ModulationScheme scheme;
    cvec symbols;
    std::uint64_t seed = 0;
};

// Canonical unit-power point set; deterministic, cached per scheme.
const ConstellationSet& constellation(ModulationScheme scheme);

// count i.i.d. uniform draws from the scheme's alphabet. Same
// (scheme, count, seed) => bit-identical block.
SymbolBlock generate_symbols(ModulationScheme scheme, int count,
                             std::uint64_t seed);

// Each symbol x becomes sps consecutive samples of x/sqrt(sps), preserving
// per-symbol energy. Throws std::invalid_argument for sps < 1.
SampleBlock pulse_shape(const SymbolBlock& block, int sps = kDefaultSps);

}  // namespace cumsig::modem
