#pragma once

// Single-feature comparison classifier: a modified sixth-order cumulant,
// blind relative channel-tap estimation from lagged fourth-order moments,
// and a multipath correction factor.  Residual minimization over the
// (modulation, reference-lag) grid yields the label.

#include <span>

#include "cumsig/cumulants.hpp"
#include "cumsig/modem.hpp"
#include "cumsig/types.hpp"

namespace cumsig::baseline {

// Relative channel estimate: taps[k] = ratio of the lagged fourth moment at
// lag k to the self-lag moment at the reference lag; taps[reference_lag] is
// exactly 1 by construction.
struct ChannelTapEstimate {
    cvec taps;
    int reference_lag = 0;
};

// Modified sixth-order cumulant
//   [m63 - 9 m42 m21 + 12 |m20|^2 m21 + 12 m21^3] / (k21 - sigma_n_sq)^3.
// All numerator terms are real for any sample block.  Unlike the true
// cumulant (below) this form drops the m20*conj(m41) coupling, which makes
// it differ on PAM alphabets of order four and up.
// Throws DegenerateEnergyError when k21 - sigma_n_sq <= 0.
double modified_k63(const cumulants::MomentTable& moments, double sigma_n_sq);

// True sixth-order cumulant at (n, q) = (6, 3) under vanishing odd moments:
//   [m63 - 9 m42 m21 - 6 Re{m20 conj(m41)} + 18 |m20|^2 m21 + 12 m21^3]
//     / (k21 - sigma_n_sq)^3.
// Provided for diagnostics; equals modified_k63 whenever m20*conj(m41) and
// |m20|^2 vanish (all PSK/QAM alphabets here).
double true_k63(const cumulants::MomentTable& moments, double sigma_n_sq);

// Ideal reference value per scheme: modified_k63 evaluated on the exact
// unit-power constellation moments (noise-free).  The reference deliberately
// uses the same functional form as the estimator so that PAM alphabets,
// where the modified and true cumulants differ, are still matched.
double od_reference(modem::ModulationScheme scheme);

// Relative channel taps from lagged fourth moments:
//   taps[k] = mean[r(v-k) r(v-f)^3] / mean[r(v-f)^4],  k = 0..tap_count-1,
// with f = reference_lag and the mean over the fixed window
// v in [tap_count-1, N) so every lag stays in range (no wraparound).
// Preconditions: 0 <= reference_lag < tap_count, block length > tap_count.
// Throws UnstableReferenceError when |mean[r(v-f)^4]| < 1e-12.
ChannelTapEstimate estimate_channel(const SampleBlock& samples, int tap_count,
                                    int reference_lag);

// Multipath correction factor: sum|h|^6 / (sum|h|^2)^3.  Lies in (0, 1],
// equals 1 iff exactly one tap is nonzero, and is invariant to a common
// complex scale.  Throws std::invalid_argument on empty or all-zero taps.
double beta63(const cvec& taps);

// Classify by global residual minimization: for each stable reference lag
// f, correct the modified cumulant by the estimated multipath factor and
// compare against every scheme's ideal reference; the (scheme, f) pair with
// the smallest |corrected - reference| wins.  Ties resolve to the earliest
// reference lag, then the earliest scheme in mod_set.
// Throws ClassificationFailure when every reference lag is unstable, and
// propagates DegenerateEnergyError from the cumulant itself.
modem::ModulationScheme classify_od(
    const SampleBlock& samples, int tap_count,
    std::span<const modem::ModulationScheme> mod_set, double sigma_n_sq);

}  // namespace cumsig::baseline
