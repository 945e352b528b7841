// Sample-moment estimation and joint cumulants of complex blocks.
//
// Moments m_{n,q} = (1/N) sum r^{n-q} conj(r)^q are estimated in one pass
// with compensated summation (10th-power terms lose digits under naive
// accumulation). Cumulants kappa_{n,q} come from two independent routes:
//
//  - cumulant_partition: the general moment-cumulant formula, summing over
//    all set partitions of the n indices with q of them conjugated. Term
//    tables (integer coefficient + moment factors per partition class) are
//    enumerated once per order and memoized; evaluation is then a small
//    polynomial in the moment values. Valid for any input, including
//    non-zero-mean data.
//  - cumulant_closed: hand-written expansions for the 20 feature pairs,
//    which assume zero mean and zero odd-order moments (true for the
//    negation-symmetric alphabets used here, and for any channel/noise
//    transformation of them).
//
// The two routes agreeing on random data is the correctness gate for both.
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cumsig/modem.hpp"
#include "cumsig/types.hpp"
#include "cumsig/ws_vector.hpp"

namespace cumsig::cumulants {

class MomentTable {
  public:
    MomentTable(int max_order, std::size_t sample_count);

    // q beyond floor(n/2) resolves via m_{n,q} = conj(m_{n,n-q}).
    cplx get(int n, int q) const;
    void set(int n, int q, cplx value);

    int max_order() const { return max_order_; }
    std::size_t sample_count() const { return sample_count_; }

  private:
    static std::size_t index(int n, int q);
    int max_order_;
    std::size_t sample_count_;
    std::array<cplx, 35> entries_{};  // n in 1..10, q in 0..floor(n/2)
};

// One pass over the block; all m_{n,q} for n = 1..max_order (odd orders and
// m_{1,0} included — the partition route needs them on arbitrary data).
MomentTable estimate_moments(const SampleBlock& samples, int max_order = 10);
MomentTable estimate_moments(const cvec& samples, int max_order = 10);

// One summand of a cumulant expansion: coeff * prod of m_{order,conj}
// factors. Exposed so tests can check expansions symbolically.
struct CumulantTerm {
    long long coeff;
    std::vector<std::pair<int, int>> factors;  // (order, conj count), sorted
};

// Memoized expansion of kappa_{n,q} over set-partition classes.
const std::vector<CumulantTerm>& cumulant_terms(int n, int q);

// General-formula route (n <= 10, q <= floor(n/2)).
cplx cumulant_partition(const MomentTable& moments, int n, int q);

// Closed-form route for the 20 feature pairs only.
cplx cumulant_closed(const MomentTable& moments, int n, int q);

// |raw / (kappa21 - sigma_n_sq)^(n/2)|. Zero raw short-circuits to zero;
// otherwise a non-positive denominator throws DegenerateEnergyError.
double normalize(cplx raw, double kappa21, double sigma_n_sq, int n);

// Exact-expectation signature of a scheme: moments over the constellation
// points stand in for sample means (h = 1, no noise).
WaveformSignature theoretical_ws(modem::ModulationScheme scheme);

}  // namespace cumsig::cumulants
