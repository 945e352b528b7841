#include "cumsig/cumulants.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>

namespace cumsig::cumulants {
namespace {

// Start offset of each order's (n, q<=n/2) run in the flat entry array.
constexpr std::array<int, 10> kOrderOffset{0, 1, 3, 5, 8, 11, 15, 19, 24, 29};

// Compensated (Neumaier) accumulator: keeps ~double-double accuracy for long
// sums of same-sign high-power terms.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

MomentTable::MomentTable(int max_order, std::size_t sample_count)
    : max_order_(max_order), sample_count_(sample_count) {}

std::size_t MomentTable::index(int n, int q) {
    return static_cast<std::size_t>(kOrderOffset[n - 1] + q);
}

cplx MomentTable::get(int n, int q) const {
    if (n < 1 || n > max_order_ || q < 0 || q > n) {
        throw std::invalid_argument("moment index out of range");
    }
    if (2 * q <= n) return entries_[index(n, q)];
    return std::conj(entries_[index(n, n - q)]);
}

void MomentTable::set(int n, int q, cplx value) {
    if (n < 1 || n > max_order_ || q < 0 || 2 * q > n) {
        throw std::invalid_argument("moment index out of range");
    }
    entries_[index(n, q)] = value;
}

MomentTable estimate_moments(const SampleBlock& samples, int max_order) {
    return estimate_moments(samples.samples, max_order);
}

MomentTable estimate_moments(const cvec& samples, int max_order) {
    if (samples.empty()) throw std::invalid_argument("empty sample block");
    if (max_order < 2 || max_order > 10 || max_order % 2 != 0) {
        throw std::invalid_argument("max_order must be even and in [2, 10]");
    }
    const int entry_count = kOrderOffset[max_order - 1] + max_order / 2 + 1;
    std::vector<CompensatedSum> re(static_cast<std::size_t>(entry_count));
    std::vector<CompensatedSum> im(static_cast<std::size_t>(entry_count));

    std::array<cplx, 11> pw;  // pw[k] = r^k
    for (const auto& r : samples) {
        pw[0] = 1.0;
        for (int k = 1; k <= max_order; ++k) pw[k] = pw[k - 1] * r;
        int e = 0;
        for (int n = 1; n <= max_order; ++n) {
            for (int q = 0; q <= n / 2; ++q, ++e) {
                const cplx term = pw[n - q] * std::conj(pw[q]);
                re[static_cast<std::size_t>(e)].add(term.real());
                im[static_cast<std::size_t>(e)].add(term.imag());
            }
        }
    }

    MomentTable table(max_order, samples.size());
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    int e = 0;
    for (int n = 1; n <= max_order; ++n) {
        for (int q = 0; q <= n / 2; ++q, ++e) {
            table.set(n, q,
                      cplx{re[static_cast<std::size_t>(e)].value() * inv_n,
                           im[static_cast<std::size_t>(e)].value() * inv_n});
        }
    }
    return table;
}

// ----------------------------------------------------------------------
// Set-partition route
// ----------------------------------------------------------------------
namespace {

// Term tables for kappa_{n,q}, all n <= 10, q <= floor(n/2). Built once by
// enumerating every set partition of {0..n-1}; a partition with p blocks
// contributes (-1)^(p-1) (p-1)! to the coefficient of its factor profile,
// where each block of size s containing c conjugated indices (the top q
// index positions) yields a factor m_{s,c}.
struct OrderTables {
    std::vector<std::vector<CumulantTerm>> per_q;
};

std::array<OrderTables, 11> build_all_tables() {
    constexpr long long kFactorial[10] = {1,      1,     2,      6,      24,
                                          120,    720,   5040,   40320,  362880};
    std::array<OrderTables, 11> all;
    for (int n = 1; n <= 10; ++n) {
        const int qmax = n / 2;
        using Key = std::vector<std::pair<int, int>>;
        std::vector<std::map<Key, long long>> acc(
            static_cast<std::size_t>(qmax) + 1);

        struct Block {
            int size;
            unsigned mask;
        };
        std::vector<Block> blocks;
        blocks.reserve(static_cast<std::size_t>(n));

        auto record_leaf = [&] {
            const int p = static_cast<int>(blocks.size());
            const long long coeff =
                (p - 1) % 2 ? -kFactorial[p - 1] : kFactorial[p - 1];
            for (int q = 0; q <= qmax; ++q) {
                Key key;
                key.reserve(blocks.size());
                for (const auto& b : blocks) {
                    key.emplace_back(b.size, std::popcount(b.mask >> (n - q)));
                }
                std::sort(key.begin(), key.end());
                acc[static_cast<std::size_t>(q)][std::move(key)] += coeff;
            }
        };

        std::function<void(int)> place = [&](int i) {
            if (i == n) {
                record_leaf();
                return;
            }
            for (auto& b : blocks) {
                ++b.size;
                b.mask |= 1u << i;
                place(i + 1);
                --b.size;
                b.mask &= ~(1u << i);
            }
            blocks.push_back({1, 1u << i});
            place(i + 1);
            blocks.pop_back();
        };
        place(0);

        auto& tables = all[static_cast<std::size_t>(n)];
        tables.per_q.resize(static_cast<std::size_t>(qmax) + 1);
        for (int q = 0; q <= qmax; ++q) {
            for (const auto& [key, coeff] : acc[static_cast<std::size_t>(q)]) {
                if (coeff == 0) continue;
                tables.per_q[static_cast<std::size_t>(q)].push_back(
                    CumulantTerm{coeff, key});
            }
        }
    }
    return all;
}

const std::array<OrderTables, 11>& all_tables() {
    static const std::array<OrderTables, 11> tables = build_all_tables();
    return tables;
}

}  // namespace

const std::vector<CumulantTerm>& cumulant_terms(int n, int q) {
    if (n < 1 || n > 10) {
        throw std::invalid_argument(
            "unsupported cumulant order (partition route handles n <= 10)");
    }
    if (q < 0 || 2 * q > n) {
        throw std::invalid_argument("conjugate count must satisfy q <= n/2");
    }
    return all_tables()[static_cast<std::size_t>(n)]
        .per_q[static_cast<std::size_t>(q)];
}

cplx cumulant_partition(const MomentTable& moments, int n, int q) {
    const auto& terms = cumulant_terms(n, q);
    cplx acc = 0.0;
    for (const auto& term : terms) {
        cplx prod = static_cast<double>(term.coeff);
        for (const auto& [s, c] : term.factors) prod *= moments.get(s, c);
        acc += prod;
    }
    return acc;
}

// ----------------------------------------------------------------------
// Closed-form route
// ----------------------------------------------------------------------
namespace {

cplx c(cplx z) { return std::conj(z); }
cplx sq(cplx z) { return z * z; }
cplx cube(cplx z) { return z * z * z; }

}  // namespace

cplx cumulant_closed(const MomentTable& m, int n, int q) {
    const cplx m20 = m.get(2, 0), m21 = m.get(2, 1);
    switch (n * 16 + q) {
        case 2 * 16 + 0:
            return m20;
        case 2 * 16 + 1:
            return m21;
        case 4 * 16 + 0:
            return m.get(4, 0) - 3.0 * sq(m20);
        case 4 * 16 + 1:
            return m.get(4, 1) - 3.0 * m20 * m21;
        case 4 * 16 + 2:
            return m.get(4, 2) - m20 * c(m20) - 2.0 * sq(m21);
    }

    const cplx m40 = m.get(4, 0), m41 = m.get(4, 1), m42 = m.get(4, 2);
    switch (n * 16 + q) {
        case 6 * 16 + 0:
            return m.get(6, 0) - 15.0 * m20 * m40 + 30.0 * cube(m20);
        case 6 * 16 + 1:
            return m.get(6, 1) - 10.0 * m20 * m41 - 5.0 * m21 * m40 +
                   30.0 * sq(m20) * m21;
        case 6 * 16 + 2:
            return m.get(6, 2) - 6.0 * m20 * m42 - 8.0 * m21 * m41 -
                   c(m20) * m40 + 6.0 * sq(m20) * c(m20) +
                   24.0 * m20 * sq(m21);
        case 6 * 16 + 3:
            return m.get(6, 3) - 3.0 * m20 * c(m41) - 9.0 * m21 * m42 -
                   3.0 * c(m20) * m41 + 18.0 * m20 * m21 * c(m20) +
                   12.0 * cube(m21);
    }

    const cplx m60 = m.get(6, 0), m61 = m.get(6, 1), m62 = m.get(6, 2),
               m63 = m.get(6, 3);
    switch (n * 16 + q) {
        case 8 * 16 + 0:
            return m.get(8, 0) - 28.0 * m20 * m60 - 35.0 * sq(m40) +
                   420.0 * sq(m20) * m40 - 630.0 * sq(sq(m20));
        case 8 * 16 + 1:
            return m.get(8, 1) - 21.0 * m20 * m61 - 7.0 * m21 * m60 -
                   35.0 * m40 * m41 + 210.0 * sq(m20) * m41 +
                   210.0 * m20 * m21 * m40 - 630.0 * cube(m20) * m21;
        case 8 * 16 + 2:
            return m.get(8, 2) - 15.0 * m20 * m62 - 12.0 * m21 * m61 -
                   c(m20) * m60 - 15.0 * m40 * m42 - 20.0 * sq(m41) +
                   90.0 * sq(m20) * m42 + 240.0 * m20 * m21 * m41 +
                   30.0 * m20 * c(m20) * m40 + 60.0 * sq(m21) * m40 -
                   90.0 * cube(m20) * c(m20) - 540.0 * sq(m20) * sq(m21);
        case 8 * 16 + 3:
            return m.get(8, 3) - 10.0 * m20 * m63 - 15.0 * m21 * m62 -
                   3.0 * c(m20) * m61 - 5.0 * m40 * c(m41) -
                   30.0 * m41 * m42 + 30.0 * sq(m20) * c(m41) +
                   180.0 * m20 * m21 * m42 + 60.0 * m20 * c(m20) * m41 +
                   120.0 * sq(m21) * m41 + 30.0 * m21 * c(m20) * m40 -
                   270.0 * sq(m20) * m21 * c(m20) - 360.0 * m20 * cube(m21);
        case 8 * 16 + 4:
            return m.get(8, 4) - 6.0 * m20 * c(m62) - 16.0 * m21 * m63 -
                   6.0 * c(m20) * m62 - m40 * c(m40) - 16.0 * m41 * c(m41) -
                   18.0 * sq(m42) + 6.0 * sq(m20) * c(m40) +
                   96.0 * m20 * m21 * c(m41) + 72.0 * m20 * c(m20) * m42 +
                   144.0 * sq(m21) * m42 + 96.0 * m21 * c(m20) * m41 +
                   6.0 * sq(c(m20)) * m40 - 54.0 * sq(m20) * sq(c(m20)) -
                   432.0 * m20 * sq(m21) * c(m20) - 144.0 * sq(sq(m21));
    }

    const cplx m80 = m.get(8, 0), m81 = m.get(8, 1), m82 = m.get(8, 2),
               m83 = m.get(8, 3), m84 = m.get(8, 4);
    switch (n * 16 + q) {
        case 10 * 16 + 0:
            return m.get(10, 0) - 45.0 * m20 * m80 - 210.0 * m40 * m60 +
                   1260.0 * sq(m20) * m60 + 3150.0 * m20 * sq(m40) -
                   18900.0 * cube(m20) * m40 + 22680.0 * sq(sq(m20)) * m20;
        case 10 * 16 + 1:
            return m.get(10, 1) - 36.0 * m20 * m81 - 9.0 * m21 * m80 -
                   126.0 * m40 * m61 - 84.0 * m41 * m60 +
                   756.0 * sq(m20) * m61 + 504.0 * m20 * m21 * m60 +
                   2520.0 * m20 * m40 * m41 + 630.0 * m21 * sq(m40) -
                   7560.0 * cube(m20) * m41 - 11340.0 * sq(m20) * m21 * m40 +
                   22680.0 * sq(sq(m20)) * m21;
        case 10 * 16 + 2:
            return m.get(10, 2) - 28.0 * m20 * m82 - 16.0 * m21 * m81 -
                   c(m20) * m80 - 70.0 * m40 * m62 - 112.0 * m41 * m61 -
                   28.0 * m42 * m60 + 420.0 * sq(m20) * m62 +
                   672.0 * m20 * m21 * m61 + 56.0 * m20 * c(m20) * m60 +
                   840.0 * m20 * m40 * m42 + 1120.0 * m20 * sq(m41) +
                   112.0 * sq(m21) * m60 + 1120.0 * m21 * m40 * m41 +
                   70.0 * c(m20) * sq(m40) - 2520.0 * cube(m20) * m42 -
                   10080.0 * sq(m20) * m21 * m41 -
                   1260.0 * sq(m20) * c(m20) * m40 -
                   5040.0 * m20 * sq(m21) * m40 +
                   2520.0 * sq(sq(m20)) * c(m20) +
                   20160.0 * cube(m20) * sq(m21);
        case 10 * 16 + 3:
            return m.get(10, 3) - 21.0 * m20 * m83 - 21.0 * m21 * m82 -
                   3.0 * c(m20) * m81 - 35.0 * m40 * m63 - 105.0 * m41 * m62 -
                   63.0 * m42 * m61 - 7.0 * c(m41) * m60 +
                   210.0 * sq(m20) * m63 + 630.0 * m20 * m21 * m62 +
                   126.0 * m20 * c(m20) * m61 + 210.0 * m20 * m40 * c(m41) +
                   1260.0 * m20 * m41 * m42 + 252.0 * sq(m21) * m61 +
                   42.0 * m21 * c(m20) * m60 + 630.0 * m21 * m40 * m42 +
                   840.0 * m21 * sq(m41) + 210.0 * c(m20) * m40 * m41 -
                   630.0 * cube(m20) * c(m41) - 5670.0 * sq(m20) * m21 * m42 -
                   1890.0 * sq(m20) * c(m20) * m41 -
                   7560.0 * m20 * sq(m21) * m41 -
                   1890.0 * m20 * m21 * c(m20) * m40 -
                   1260.0 * cube(m21) * m40 + 7560.0 * cube(m20) * m21 * c(m20) +
                   15120.0 * sq(m20) * cube(m21);
        case 10 * 16 + 4:
            return m.get(10, 4) - 15.0 * m20 * m84 - 24.0 * m21 * m83 -
                   6.0 * c(m20) * m82 - 15.0 * m40 * c(m62) -
                   80.0 * m41 * m63 - 90.0 * m42 * m62 - 24.0 * c(m41) * m61 -
                   c(m40) * m60 + 90.0 * sq(m20) * c(m62) +
                   480.0 * m20 * m21 * m63 + 180.0 * m20 * c(m20) * m62 +
                   30.0 * m20 * m40 * c(m40) + 480.0 * m20 * m41 * c(m41) +
                   540.0 * m20 * sq(m42) + 360.0 * sq(m21) * m62 +
                   144.0 * m21 * c(m20) * m61 + 240.0 * m21 * m40 * c(m41) +
                   1440.0 * m21 * m41 * m42 + 6.0 * sq(c(m20)) * m60 +
                   180.0 * c(m20) * m40 * m42 + 240.0 * c(m20) * sq(m41) -
                   90.0 * cube(m20) * c(m40) -
                   2160.0 * sq(m20) * m21 * c(m41) -
                   1620.0 * sq(m20) * c(m20) * m42 -
                   6480.0 * m20 * sq(m21) * m42 -
                   4320.0 * m20 * m21 * c(m20) * m41 -
                   270.0 * m20 * sq(c(m20)) * m40 - 2880.0 * cube(m21) * m41 -
                   1080.0 * sq(m21) * c(m20) * m40 +
                   1080.0 * cube(m20) * sq(c(m20)) +
                   12960.0 * sq(m20) * sq(m21) * c(m20) +
                   8640.0 * m20 * sq(sq(m21));
        case 10 * 16 + 5:
            return m.get(10, 5) - 10.0 * m20 * c(m83) - 25.0 * m21 * m84 -
                   10.0 * c(m20) * m83 - 5.0 * m40 * c(m61) -
                   50.0 * m41 * c(m62) - 100.0 * m42 * m63 -
                   50.0 * c(m41) * m62 - 5.0 * c(m40) * m61 +
                   30.0 * sq(m20) * c(m61) + 300.0 * m20 * m21 * c(m62) +
                   200.0 * m20 * c(m20) * m63 + 100.0 * m20 * m41 * c(m40) +
                   600.0 * m20 * m42 * c(m41) + 400.0 * sq(m21) * m63 +
                   300.0 * m21 * c(m20) * m62 + 50.0 * m21 * m40 * c(m40) +
                   800.0 * m21 * m41 * c(m41) + 900.0 * m21 * sq(m42) +
                   30.0 * sq(c(m20)) * m61 + 100.0 * c(m20) * m40 * c(m41) +
                   600.0 * c(m20) * m41 * m42 -
                   450.0 * sq(m20) * m21 * c(m40) -
                   900.0 * sq(m20) * c(m20) * c(m41) -
                   3600.0 * m20 * sq(m21) * c(m41) -
                   5400.0 * m20 * m21 * c(m20) * m42 -
                   900.0 * m20 * sq(c(m20)) * m41 - 3600.0 * cube(m21) * m42 -
                   3600.0 * sq(m21) * c(m20) * m41 -
                   450.0 * m21 * sq(c(m20)) * m40 +
                   5400.0 * sq(m20) * m21 * sq(c(m20)) +
                   14400.0 * m20 * cube(m21) * c(m20) +
                   2880.0 * sq(sq(m21)) * m21;
    }
    throw std::invalid_argument(
        "closed forms cover only the 20 feature (n, q) pairs");
}

double normalize(cplx raw, double kappa21, double sigma_n_sq, int n) {
    if (raw == cplx{0.0, 0.0}) return 0.0;
    const double denom = kappa21 - sigma_n_sq;
    if (!(denom > 0.0)) {
        throw DegenerateEnergyError(
            "signal energy does not exceed the noise power");
    }
    return std::abs(raw) / std::pow(denom, n / 2);
}

WaveformSignature theoretical_ws(modem::ModulationScheme scheme) {
    const auto& points = modem::constellation(scheme).points;
    const MomentTable m = estimate_moments(points);
    const double k21 = m.get(2, 1).real();
    WaveformSignature ws;
    for (std::size_t i = 0; i < kWsPairs.size(); ++i) {
        const auto [n, q] = kWsPairs[i];
        ws.values[i] = normalize(cumulant_closed(m, n, q), k21, 0.0, n);
    }
    return ws;
}

}  // namespace cumsig::cumulants
