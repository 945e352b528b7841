// Fading-channel realizations and AWGN injection.
//
// Three channel families:
//  - flat block fading: one complex scalar per block, the normalized average
//    of 200 circularly-symmetric components (Rayleigh envelope, E|h|^2 = 1);
//  - frequency-selective block fading: a tapped delay line with Poisson path
//    arrivals, Rayleigh path weights, and sinc interpolation to the sample
//    grid;
//  - flat Doppler-spread fading: a per-sample gain track from a 200-component
//    sum of sinusoids with uniform angle of arrival and phase.
#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "cumsig/rng.hpp"
#include "cumsig/types.hpp"

namespace cumsig::channel {

struct ChannelRealization {
    enum class Kind { Scalar, Taps, Track };
    Kind kind = Kind::Scalar;
    cplx scalar = {1.0, 0.0};  // Kind::Scalar
    cvec taps;                 // Kind::Taps, sum |h|^2 == 1
    cvec track;                // Kind::Track, one gain per sample
    int redraw_count = 0;      // degenerate redraws (tap draws only)
};

struct NoiseSpec {
    double snr_db = 0.0;
    double sigma_n_sq = 0.0;  // per-sample complex noise variance
};

// h = (1/sqrt(200)) * sum of 200 i.i.d. CN(0,1) components.
ChannelRealization draw_flat_block(Rng& rng);

struct TapDrawParams {
    double expected_paths = 3.55;     // Poisson mean for the total path
                                      // count, conditioned on at least one
                                      // path; <= 0 forces exactly one path
    double delay_window_s = 63e-6;    // later arrivals uniform on [0, this)
    double rayleigh_sigma_sq = 0.05;  // mean-square path magnitude E[|a|^2]
    double ripple_floor = 0.01;       // per-path tap contributions below
                                      // this magnitude are dropped
};

// Tapped-delay-line draw: path count Poisson-conditioned to be nonzero, the
// first arrival at delay 0 and the rest uniform over the delay window, each
// path sinc-spread onto the sample grid, ripples below the floor discarded,
// support trimmed, and power normalized to exactly 1. An all-zero result
// after thresholding triggers an internal redraw (counted in redraw_count).
ChannelRealization draw_turin_taps(Rng& rng,
                                   double sample_period_s = kSamplePeriodS,
                                   const TapDrawParams& params = {});

// Per-sample track h(v) = (1/sqrt(200)) * sum exp(j(2*pi*fd*cos(a_m)*v/fs
// + phi_m)); a_m, phi_m uniform on [0, 2*pi), drawn once per realization.
ChannelRealization draw_doppler_track(Rng& rng, double max_doppler_hz,
                                      int n_samples,
                                      double sample_rate_hz = kSampleRateHz);

// Scalar: pointwise h*x. Taps: linear convolution truncated to the input
// length. Track: pointwise h(v)*x(v) (lengths must match).
SampleBlock apply_channel(const SampleBlock& samples,
                          const ChannelRealization& ch);

// sigma_n^2 = P_s * 10^(-snr_db/10), with P_s the measured average power of
// the incoming block; snr_db = +infinity adds nothing. Returns the noisy
// block and the exact variance used, which downstream normalization treats
// as known.
std::pair<SampleBlock, NoiseSpec> add_awgn(SampleBlock samples, double snr_db,
                                           Rng& rng);

// Named fading draws as serialized in configs and reports: "clarke" (flat
// block), "turin" (selective block), "clarke5"/"clarke70"/"clarke200"
// (Doppler tracks at 5/70/200 Hz; these need the block length). Throws
// std::invalid_argument for unknown tags.
bool is_channel_tag(const std::string& tag);
ChannelRealization draw_by_tag(const std::string& tag, Rng& rng,
                               int n_samples);

}  // namespace cumsig::channel
