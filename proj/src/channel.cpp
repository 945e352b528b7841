#include "cumsig/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cumsig::channel {
namespace {

constexpr int kComponentCount = 200;

double sinc(double x) {
    if (x == 0.0) return 1.0;
    double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Knuth's product method; fine for small means.
int draw_poisson(Rng& rng, double mean) {
    const double limit = std::exp(-mean);
    int count = 0;
    double product = rng.uniform_pos();
    while (product > limit) {
        ++count;
        product *= rng.uniform_pos();
    }
    return count;
}

struct Path {
    double delay_s;
    cplx amplitude;
};

// One tap-draw attempt; may produce an empty tap list if every sinc
// contribution falls below the ripple floor.
cvec draw_taps_once(Rng& rng, double sample_period_s,
                    const TapDrawParams& params) {
    int total = 1;
    if (params.expected_paths > 0.0) {
        do {
            total = draw_poisson(rng, params.expected_paths);
        } while (total < 1);
    }
    std::vector<Path> paths;
    paths.push_back({0.0, {0.0, 0.0}});
    for (int i = 1; i < total; ++i) {
        paths.push_back({rng.uniform() * params.delay_window_s, {0.0, 0.0}});
    }
    // Rayleigh magnitude parameterized by its mean square: E[mag^2] equals
    // rayleigh_sigma_sq.
    const double rms = std::sqrt(params.rayleigh_sigma_sq);
    for (auto& p : paths) {
        double mag = rms * std::sqrt(-std::log(rng.uniform_pos()));
        double phase = rng.uniform() * 2.0 * std::numbers::pi;
        p.amplitude = mag * cplx{std::cos(phase), std::sin(phase)};
    }

    // Spread each path over the integer sample grid; keep only contributions
    // whose magnitude clears the ripple floor.
    std::map<long, cplx> grid;
    for (const auto& p : paths) {
        const double mag = std::abs(p.amplitude);
        if (mag < params.ripple_floor) continue;
        // |sinc(x)| <= 1/(pi*|x|), so contributions are above the floor only
        // within this many samples of the path delay.
        const double reach = mag / (std::numbers::pi * params.ripple_floor);
        const double center = p.delay_s / sample_period_s;
        const long lo = static_cast<long>(std::floor(center - reach));
        const long hi = static_cast<long>(std::ceil(center + reach));
        for (long v = lo; v <= hi; ++v) {
            const cplx c = p.amplitude * sinc(static_cast<double>(v) - center);
            if (std::abs(c) < params.ripple_floor) continue;
            grid[v] += c;
        }
    }
    if (grid.empty()) return {};

    const long first = grid.begin()->first;
    const long last = grid.rbegin()->first;
    cvec taps(static_cast<std::size_t>(last - first + 1), cplx{0.0, 0.0});
    for (const auto& [v, c] : grid) taps[static_cast<std::size_t>(v - first)] = c;
    return taps;
}

}  // namespace

ChannelRealization draw_flat_block(Rng& rng) {
    cplx sum = 0.0;
    for (int m = 0; m < kComponentCount; ++m) sum += rng.cnormal();
    ChannelRealization ch;
    ch.kind = ChannelRealization::Kind::Scalar;
    ch.scalar = sum / std::sqrt(static_cast<double>(kComponentCount));
    return ch;
}

ChannelRealization draw_turin_taps(Rng& rng, double sample_period_s,
                                   const TapDrawParams& params) {
    ChannelRealization ch;
    ch.kind = ChannelRealization::Kind::Taps;
    for (;;) {
        cvec taps = draw_taps_once(rng, sample_period_s, params);
        if (taps.empty()) {
            ++ch.redraw_count;
            continue;
        }
        double power = 0.0;
        for (const auto& t : taps) power += std::norm(t);
        const double scale = 1.0 / std::sqrt(power);
        for (auto& t : taps) t *= scale;
        ch.taps = std::move(taps);
        return ch;
    }
}

ChannelRealization draw_doppler_track(Rng& rng, double max_doppler_hz,
                                      int n_samples, double sample_rate_hz) {
    if (n_samples < 1) throw std::invalid_argument("track length must be >= 1");
    ChannelRealization ch;
    ch.kind = ChannelRealization::Kind::Track;
    ch.track.assign(static_cast<std::size_t>(n_samples), cplx{0.0, 0.0});

    // Each component is a unit phasor advancing by a fixed per-sample
    // rotation; accumulate incrementally instead of calling exp() N*200 times.
    std::vector<cplx> phasor(kComponentCount);
    std::vector<cplx> step(kComponentCount);
    for (int m = 0; m < kComponentCount; ++m) {
        const double angle = rng.uniform() * 2.0 * std::numbers::pi;
        const double phase = rng.uniform() * 2.0 * std::numbers::pi;
        const double omega = 2.0 * std::numbers::pi * max_doppler_hz *
                             std::cos(angle) / sample_rate_hz;
        phasor[m] = {std::cos(phase), std::sin(phase)};
        step[m] = {std::cos(omega), std::sin(omega)};
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(kComponentCount));
    for (auto& h : ch.track) {
        cplx sum = 0.0;
        for (int m = 0; m < kComponentCount; ++m) {
            sum += phasor[m];
            phasor[m] *= step[m];
        }
        h = sum * scale;
    }
    return ch;
}

SampleBlock apply_channel(const SampleBlock& samples,
                          const ChannelRealization& ch) {
    SampleBlock out = samples;
    switch (ch.kind) {
        case ChannelRealization::Kind::Scalar:
            for (auto& s : out.samples) s *= ch.scalar;
            return out;
        case ChannelRealization::Kind::Taps: {
            const auto& x = samples.samples;
            const auto n = x.size();
            for (std::size_t v = n; v-- > 0;) {
                cplx acc = 0.0;
                const std::size_t tmax = std::min(ch.taps.size() - 1, v);
                for (std::size_t t = 0; t <= tmax; ++t) {
                    acc += ch.taps[t] * x[v - t];
                }
                out.samples[v] = acc;
            }
            return out;
        }
        case ChannelRealization::Kind::Track: {
            if (ch.track.size() != samples.samples.size()) {
                throw std::invalid_argument(
                    "gain track length does not match sample count");
            }
            for (std::size_t v = 0; v < out.samples.size(); ++v) {
                out.samples[v] *= ch.track[v];
            }
            return out;
        }
    }
    throw std::invalid_argument("unknown channel realization kind");
}

bool is_channel_tag(const std::string& tag) {
    return tag == "clarke" || tag == "turin" || tag == "clarke5" ||
           tag == "clarke70" || tag == "clarke200";
}

ChannelRealization draw_by_tag(const std::string& tag, Rng& rng,
                               int n_samples) {
    if (tag == "clarke") return draw_flat_block(rng);
    if (tag == "turin") return draw_turin_taps(rng);
    if (tag == "clarke5") return draw_doppler_track(rng, 5.0, n_samples);
    if (tag == "clarke70") return draw_doppler_track(rng, 70.0, n_samples);
    if (tag == "clarke200") return draw_doppler_track(rng, 200.0, n_samples);
    throw std::invalid_argument("unknown channel tag: " + tag);
}

std::pair<SampleBlock, NoiseSpec> add_awgn(SampleBlock samples, double snr_db,
                                           Rng& rng) {
    NoiseSpec spec;
    spec.snr_db = snr_db;
    if (std::isinf(snr_db) && snr_db > 0) {
        spec.sigma_n_sq = 0.0;
        return {std::move(samples), spec};
    }
    double power = 0.0;
    for (const auto& s : samples.samples) power += std::norm(s);
    power /= static_cast<double>(samples.samples.size());
    spec.sigma_n_sq = power * std::pow(10.0, -snr_db / 10.0);
    const double amp = std::sqrt(spec.sigma_n_sq);
    for (auto& s : samples.samples) s += amp * rng.cnormal();
    return {std::move(samples), spec};
}

}  // namespace cumsig::channel
