// Shared scalar types, block containers, and error categories.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace cumsig {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Sampling grid: 3 samples per symbol at a 156.25 us symbol period.
inline constexpr double kSymbolPeriodS = 156.25e-6;
inline constexpr int kDefaultSps = 3;
inline constexpr double kSamplePeriodS = kSymbolPeriodS / kDefaultSps;
inline constexpr double kSampleRateHz = 1.0 / kSamplePeriodS;  // 19.2 kHz

// Block of complex baseband samples on the fixed grid.
struct SampleBlock {
    cvec samples;
    int samples_per_symbol = kDefaultSps;
    double sample_period_s = kSamplePeriodS;
};

// Signal energy fell at or below the supplied noise power; the
// energy-normalization denominator is not positive.
struct DegenerateEnergyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The fourth-power reference moment of a lag alignment is numerically zero;
// channel-tap ratios against it are meaningless.
struct UnstableReferenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A classifier could not produce a label for this block (e.g. every lag
// alignment was unstable). Callers count the trial and record the failure.
struct ClassificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cumsig
