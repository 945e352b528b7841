#include "cumsig/modem.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "cumsig/rng.hpp"

namespace cumsig::modem {
namespace {

cvec psk_points(int order) {
    cvec pts(order);
    for (int k = 0; k < order; ++k) {
        double angle = 2.0 * std::numbers::pi * k / order;
        pts[k] = {std::cos(angle), std::sin(angle)};
    }
    return pts;
}

// Real-axis amplitudes {+-1, +-3, ...}, scaled to unit average power.
cvec pam_points(int order) {
    cvec pts;
    pts.reserve(order);
    double power = 0.0;
    for (int k = 0; k < order / 2; ++k) {
        double amp = 2.0 * k + 1.0;
        pts.emplace_back(amp, 0.0);
        pts.emplace_back(-amp, 0.0);
        power += 2.0 * amp * amp;
    }
    double scale = 1.0 / std::sqrt(power / order);
    for (auto& p : pts) p *= scale;
    return pts;
}

// w x h grid of odd-integer coordinates, unit average power.
cvec rect_qam_points(int w, int h) {
    cvec pts;
    pts.reserve(static_cast<std::size_t>(w) * h);
    double power = 0.0;
    for (int a = 0; a < w; ++a) {
        for (int b = 0; b < h; ++b) {
            double x = 2.0 * a + 1.0 - w;
            double y = 2.0 * b + 1.0 - h;
            pts.emplace_back(x, y);
            power += x * x + y * y;
        }
    }
    double scale = 1.0 / std::sqrt(power / static_cast<double>(pts.size()));
    for (auto& p : pts) p *= scale;
    return pts;
}

// side x side grid with corner x corner blocks removed from each corner
// (cross constellation), unit average power.
cvec cross_qam_points(int side, int corner) {
    cvec pts;
    double power = 0.0;
    for (int a = 0; a < side; ++a) {
        for (int b = 0; b < side; ++b) {
            double x = 2.0 * a + 1.0 - side;
            double y = 2.0 * b + 1.0 - side;
            if (std::abs(x) > side - 2 * corner &&
                std::abs(y) > side - 2 * corner) {
                continue;
            }
            pts.emplace_back(x, y);
            power += x * x + y * y;
        }
    }
    double scale = 1.0 / std::sqrt(power / static_cast<double>(pts.size()));
    for (auto& p : pts) p *= scale;
    return pts;
}

cvec build_points(ModulationScheme scheme) {
    using enum ModulationScheme;
    switch (scheme) {
        case BPSK:   return {{1.0, 0.0}, {-1.0, 0.0}};
        case QPSK:   return rect_qam_points(2, 2);
        case PSK8:   return psk_points(8);
        case PSK16:  return psk_points(16);
        case PAM4:   return pam_points(4);
        case PAM8:   return pam_points(8);
        case PAM16:  return pam_points(16);
        case QAM4:   return rect_qam_points(2, 2);
        case QAM8:   return rect_qam_points(4, 2);
        case QAM16:  return rect_qam_points(4, 4);
        case QAM32:  return cross_qam_points(6, 1);
        case QAM64:  return rect_qam_points(8, 8);
        case QAM128: return cross_qam_points(12, 2);
        case QAM256: return rect_qam_points(16, 16);
    }
    throw std::invalid_argument("unknown modulation scheme");
}

constexpr std::array<std::pair<ModulationScheme, std::string_view>,
                     kSchemeCount>
    kLabels{{
        {ModulationScheme::BPSK, "BPSK"},
        {ModulationScheme::QPSK, "QPSK"},
        {ModulationScheme::PSK8, "8PSK"},
        {ModulationScheme::PSK16, "16PSK"},
        {ModulationScheme::PAM4, "4PAM"},
        {ModulationScheme::PAM8, "8PAM"},
        {ModulationScheme::PAM16, "16PAM"},
        {ModulationScheme::QAM4, "4QAM"},
        {ModulationScheme::QAM8, "8QAM"},
        {ModulationScheme::QAM16, "16QAM"},
        {ModulationScheme::QAM32, "32QAM"},
        {ModulationScheme::QAM64, "64QAM"},
        {ModulationScheme::QAM128, "128QAM"},
        {ModulationScheme::QAM256, "256QAM"},
    }};

}  // namespace

const std::vector<ModulationScheme>& all_schemes() {
    static const std::vector<ModulationScheme> schemes = [] {
        std::vector<ModulationScheme> v;
        for (const auto& [scheme, label] : kLabels) v.push_back(scheme);
        return v;
    }();
    return schemes;
}

std::string_view to_label(ModulationScheme scheme) {
    for (const auto& [s, label] : kLabels) {
        if (s == scheme) return label;
    }
    throw std::invalid_argument("unknown modulation scheme");
}

std::optional<ModulationScheme> scheme_from_label(std::string_view label) {
    for (const auto& [s, l] : kLabels) {
        if (l == label) return s;
    }
    return std::nullopt;
}

const ConstellationSet& constellation(ModulationScheme scheme) {
    static const std::map<ModulationScheme, ConstellationSet> cache = [] {
        std::map<ModulationScheme, ConstellationSet> m;
        for (const auto& [s, label] : kLabels) {
            m.emplace(s, ConstellationSet{s, build_points(s)});
        }
        return m;
    }();
    return cache.at(scheme);
}

SymbolBlock generate_symbols(ModulationScheme scheme, int count,
                             std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("symbol count must be >= 1");
    const auto& pts = constellation(scheme).points;
    // All alphabet sizes are powers of two, so masking a raw 64-bit word
    // gives an exactly uniform index.
    const std::uint64_t mask = pts.size() - 1;
    Rng rng(seed);
    SymbolBlock block{scheme, cvec(static_cast<std::size_t>(count)), seed};
    for (auto& s : block.symbols) s = pts[rng.next_u64() & mask];
    return block;
}

SampleBlock pulse_shape(const SymbolBlock& block, int sps) {
    if (sps < 1) throw std::invalid_argument("samples per symbol must be >= 1");
    SampleBlock out;
    out.samples_per_symbol = sps;
    out.sample_period_s = kSymbolPeriodS / sps;
    out.samples.reserve(block.symbols.size() * static_cast<std::size_t>(sps));
    const double scale = 1.0 / std::sqrt(static_cast<double>(sps));
    for (const auto& x : block.symbols) {
        const cplx v = x * scale;
        for (int i = 0; i < sps; ++i) out.samples.push_back(v);
    }
    return out;
}

}  // namespace cumsig::modem
