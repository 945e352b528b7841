#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cumsig/cumulants.hpp"
#include "cumsig/modem.hpp"
#include "cumsig/rng.hpp"
#include "cumsig/types.hpp"

using namespace cumsig;
using namespace cumsig::cumulants;

namespace {

// Copy of a moment table with every odd-order entry (including the mean)
// forced to zero, matching the assumption baked into the closed forms.
MomentTable zero_odd_orders(const MomentTable& m) {
    MomentTable out = m;
    for (int n = 1; n <= m.max_order(); n += 2) {
        for (int q = 0; q <= n / 2; ++q) out.set(n, q, cplx{0.0, 0.0});
    }
    return out;
}

cvec random_block(Rng& rng, int n, double scale) {
    cvec block(static_cast<std::size_t>(n));
    for (auto& s : block) s = scale * rng.cnormal();
    return block;
}

}  // namespace

TEST_CASE("moments of a constant block are all one") {
    cvec block(64, cplx{1.0, 0.0});
    auto m = estimate_moments(block);
    for (int n = 1; n <= 10; ++n) {
        for (int q = 0; q <= n / 2; ++q) {
            CHECK(std::abs(m.get(n, q) - cplx{1.0, 0.0}) < 1e-15);
        }
    }
    CHECK(m.sample_count() == 64);
}

TEST_CASE("moments of the two-point block (1, -1) match hand values") {
    cvec block{cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
    auto m = estimate_moments(block);
    CHECK(std::abs(m.get(2, 1) - cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(m.get(1, 0)) < 1e-15);
    CHECK(std::abs(m.get(3, 0)) < 1e-15);
    CHECK(std::abs(m.get(4, 2) - cplx{1.0, 0.0}) < 1e-15);
}

TEST_CASE("mean fourth magnitude dominates squared mean square (Jensen)") {
    Rng rng(201);
    auto m = estimate_moments(random_block(rng, 256, 1.0));
    double m42 = m.get(4, 2).real();
    double m21 = m.get(2, 1).real();
    CHECK(m42 >= m21 * m21);
}

TEST_CASE("conjugate counts past n/2 resolve by conjugation symmetry") {
    Rng rng(202);
    auto m = estimate_moments(random_block(rng, 128, 1.0));
    CHECK(m.get(4, 3) == std::conj(m.get(4, 1)));
    CHECK(m.get(6, 5) == std::conj(m.get(6, 1)));
    CHECK(m.get(2, 2) == std::conj(m.get(2, 0)));
}

TEST_CASE("an empty block is rejected") {
    cvec empty;
    CHECK_THROWS_AS((void)estimate_moments(empty), std::invalid_argument);
}

TEST_CASE("third-order expansion has exactly the classical three terms") {
    // kappa_30 = m30 - 3 m20 m10 + 2 m10^3
    const auto& terms = cumulant_terms(3, 0);
    REQUIRE(terms.size() == 3);
    int matched = 0;
    for (const auto& t : terms) {
        if (t.factors == std::vector<std::pair<int, int>>{{3, 0}}) {
            CHECK(t.coeff == 1);
            ++matched;
        } else if (t.factors ==
                   std::vector<std::pair<int, int>>{{1, 0}, {2, 0}} ||
                   t.factors ==
                   std::vector<std::pair<int, int>>{{2, 0}, {1, 0}}) {
            CHECK(t.coeff == -3);
            ++matched;
        } else if (t.factors ==
                   std::vector<std::pair<int, int>>{{1, 0}, {1, 0}, {1, 0}}) {
            CHECK(t.coeff == 2);
            ++matched;
        }
    }
    CHECK(matched == 3);
}

TEST_CASE("second-order cross cumulant subtracts the squared mean") {
    cvec block{cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
    auto m = estimate_moments(block);
    CHECK(std::abs(cumulant_partition(m, 2, 1) - cplx{1.0, 0.0}) < 1e-15);

    // Shifted data: kappa_21 = m21 - |m10|^2 stays the variance.
    cvec shifted{cplx{2.0, 1.0}, cplx{0.0, 1.0}};
    auto ms = estimate_moments(shifted);
    CHECK(std::abs(cumulant_partition(ms, 2, 1) - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("partition route rejects unsupported orders") {
    Rng rng(203);
    auto m = estimate_moments(random_block(rng, 64, 1.0));
    CHECK_THROWS((void)cumulant_partition(m, 12, 0));
    CHECK_THROWS((void)cumulant_partition(m, 4, 3));
}

TEST_CASE("Gaussian blocks null every higher-order cumulant") {
    // Sample cumulants of order 2k at a circular Gaussian fluctuate with
    // standard deviation ~ k!/sqrt(N) (their influence function is the
    // degree-k Laguerre polynomial in |r|^2, scaled by k!). Bounds below
    // are 5 of those sigmas per seed and 10 sigmas on the seed average.
    const int n_seeds = 100;
    const int n = 10000;
    const std::vector<std::pair<int, int>> pairs{{4, 2}, {6, 3}, {8, 4},
                                                 {10, 5}};
    const std::vector<double> sigma{2.0, 6.0, 24.0, 120.0};
    std::vector<double> sums(pairs.size(), 0.0);
    for (int seed = 0; seed < n_seeds; ++seed) {
        Rng rng(static_cast<std::uint64_t>(3000 + seed));
        auto m = estimate_moments(random_block(rng, n, 1.0));
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            double value =
                cumulant_partition(m, pairs[i].first, pairs[i].second).real();
            CHECK(std::abs(value) < 5.0 * sigma[i] / std::sqrt(double(n)));
            sums[i] += value;
        }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(std::abs(sums[i] / n_seeds) < sigma[i] / std::sqrt(double(n)));
    }
}

TEST_CASE("closed forms on exact alphabet moments match hand values") {
    // BPSK: every relevant moment is 1, so kappa_42 = 1 - (1 + 2) = -2.
    auto bpsk =
        estimate_moments(modem::constellation(modem::ModulationScheme::BPSK)
                             .points);
    CHECK(std::abs(cumulant_closed(bpsk, 4, 2) - cplx{-2.0, 0.0}) < 1e-12);

    // QPSK: m20 = m41 = 0, unit radial moments, so kappa_63 = 1 - 9 + 12 = 4.
    auto qpsk =
        estimate_moments(modem::constellation(modem::ModulationScheme::QPSK)
                             .points);
    CHECK(std::abs(cumulant_closed(qpsk, 6, 3) - cplx{4.0, 0.0}) < 1e-12);
}

TEST_CASE("closed forms reject pairs outside the feature list") {
    Rng rng(204);
    auto m = estimate_moments(random_block(rng, 64, 1.0));
    CHECK_THROWS_AS((void)cumulant_closed(m, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)cumulant_closed(m, 12, 6), std::invalid_argument);
}

TEST_CASE("closed and partition routes agree once odd moments vanish") {
    Rng rng(205);
    for (int trial = 0; trial < 10; ++trial) {
        double scale = 0.5 + rng.uniform() * 1.5;
        auto m = estimate_moments(random_block(rng, 256, scale));
        auto zeroed = zero_odd_orders(m);
        for (const auto& [n, q] : kWsPairs) {
            cplx closed = cumulant_closed(m, n, q);
            cplx part = cumulant_partition(zeroed, n, q);
            CHECK(std::abs(closed - part) <= 1e-9 * (1.0 + std::abs(part)));
        }
    }
}

TEST_CASE("normalization divides by the centered energy power") {
    CHECK(normalize(cplx{-2.0, 0.0}, 1.0, 0.0, 4) == doctest::Approx(2.0));
    CHECK(normalize(cplx{3.0, 4.0}, 2.0, 1.0, 2) == doctest::Approx(5.0));
    // Zero short-circuits before the denominator is touched.
    CHECK(normalize(cplx{0.0, 0.0}, 0.5, 1.0, 4) == 0.0);
    CHECK_THROWS_AS((void)normalize(cplx{1.0, 0.0}, 1.0, 1.0, 4),
                    DegenerateEnergyError);
    CHECK_THROWS_AS((void)normalize(cplx{1.0, 0.0}, 0.5, 1.0, 6),
                    DegenerateEnergyError);
}

TEST_CASE("exact-alphabet signatures match their frozen values") {
    using modem::ModulationScheme;

    const std::array<double, 20> bpsk_expected{
        1, 1, 2, 2, 2, 16, 16, 16, 16, 272,
        272, 272, 272, 272, 7936, 7936, 7936, 7936, 7936, 7936};
    auto bpsk = theoretical_ws(ModulationScheme::BPSK);
    for (std::size_t i = 0; i < kWsDim; ++i) {
        CHECK(std::abs(bpsk.values[i] - bpsk_expected[i]) <=
              1e-12 * std::max(1.0, bpsk_expected[i]));
    }

    const std::array<double, 20> qpsk_expected{
        0, 1, 1, 0, 1, 0, 4, 0, 4, 34, 0, 34, 0, 34, 0, 496, 0, 496, 0, 496};
    auto qpsk = theoretical_ws(ModulationScheme::QPSK);
    for (std::size_t i = 0; i < kWsDim; ++i) {
        CHECK(std::abs(qpsk.values[i] - qpsk_expected[i]) <=
              1e-12 * std::max(1.0, qpsk_expected[i]));
    }

    const std::array<double, 20> pam4_expected{
        1, 1, 1.36, 1.36, 1.36, 8.32, 8.32, 8.32, 8.32, 111.8464,
        111.8464, 111.8464, 111.8464, 111.8464, 2603.008, 2603.008,
        2603.008, 2603.008, 2603.008, 2603.008};
    auto pam4 = theoretical_ws(ModulationScheme::PAM4);
    for (std::size_t i = 0; i < kWsDim; ++i) {
        CHECK(std::abs(pam4.values[i] - pam4_expected[i]) <=
              1e-12 * std::max(1.0, pam4_expected[i]));
    }

    auto qam16 = theoretical_ws(ModulationScheme::QAM16);
    CHECK(qam16.values[4] == doctest::Approx(0.68).epsilon(1e-12));

    auto qam64 = theoretical_ws(ModulationScheme::QAM64);
    CHECK(qam64.values[4] ==
          doctest::Approx(0.61904761904761885).epsilon(1e-12));

    // 8PSK: the eight-fold symmetry leaves only a handful of entries.
    auto psk8 = theoretical_ws(ModulationScheme::PSK8);
    CHECK(psk8.values[8] == doctest::Approx(4.0).epsilon(1e-12));    // (6,3)
    CHECK(psk8.values[9] == doctest::Approx(1.0).epsilon(1e-12));    // (8,0)
    CHECK(psk8.values[13] == doctest::Approx(33.0).epsilon(1e-12));  // (8,4)
    CHECK(psk8.values[15] == doctest::Approx(8.0).epsilon(1e-12));   // (10,1)
    CHECK(psk8.values[19] == doctest::Approx(456.0).epsilon(1e-12)); // (10,5)
    CHECK(psk8.values[0] < 1e-9);
    CHECK(psk8.values[2] < 1e-9);
    CHECK(psk8.values[5] < 1e-9);

    // All entries are magnitudes.
    for (auto s : modem::all_schemes()) {
        auto ws = theoretical_ws(s);
        for (double v : ws.values) CHECK(v >= 0.0);
    }
}

TEST_CASE("feature estimates converge at the Monte-Carlo rate") {
    using modem::ModulationScheme;
    // 16QAM has a non-constant envelope, so kappa_42-hat carries genuine
    // 1/sqrt(N) fluctuations around 0.68.
    auto rms_at = [](int n_symbols) {
        double acc = 0.0;
        const int seeds = 40;
        for (int seed = 0; seed < seeds; ++seed) {
            auto block = modem::generate_symbols(
                ModulationScheme::QAM16, n_symbols,
                static_cast<std::uint64_t>(7000 + seed));
            auto m = estimate_moments(block.symbols);
            double k42 = std::abs(cumulant_closed(m, 4, 2));
            double k21 = m.get(2, 1).real();
            double err = k42 / (k21 * k21) - 0.68;
            acc += err * err;
        }
        return std::sqrt(acc / seeds);
    };
    double coarse = rms_at(1000);
    double fine = rms_at(100000);
    CHECK(coarse / fine > 4.0);   // expect ~10 for a 100x sample increase
    CHECK(coarse / fine < 30.0);
    CHECK(fine < 0.01);

    // Constant-envelope QPSK pins the radial moments exactly, so the
    // estimate collapses onto the ideal value even faster.
    auto qpsk = modem::generate_symbols(ModulationScheme::QPSK, 10000, 11);
    auto m = estimate_moments(qpsk.symbols);
    double k42 = std::abs(cumulant_closed(m, 4, 2));
    double k21 = m.get(2, 1).real();
    CHECK(std::abs(k42 / (k21 * k21) - 1.0) < 1e-3);
}
