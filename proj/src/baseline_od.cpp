#include "cumsig/baseline_od.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cumsig::baseline {

namespace {

struct K63Terms {
    double m63, m42, m21;
    cplx m20, m41;
    double denom;  // k21 - sigma_n_sq
};

K63Terms gather(const cumulants::MomentTable& m, double sigma_n_sq) {
    K63Terms t;
    t.m63 = m.get(6, 3).real();
    t.m42 = m.get(4, 2).real();
    t.m21 = m.get(2, 1).real();
    t.m20 = m.get(2, 0);
    t.m41 = m.get(4, 1);
    t.denom = t.m21 - sigma_n_sq;
    if (!(t.denom > 0.0)) {
        throw DegenerateEnergyError(
            "signal energy does not exceed the noise floor");
    }
    return t;
}

}  // namespace

double modified_k63(const cumulants::MomentTable& moments, double sigma_n_sq) {
    const K63Terms t = gather(moments, sigma_n_sq);
    const double num = t.m63 - 9.0 * t.m42 * t.m21 +
                       12.0 * std::norm(t.m20) * t.m21 +
                       12.0 * t.m21 * t.m21 * t.m21;
    return num / (t.denom * t.denom * t.denom);
}

double true_k63(const cumulants::MomentTable& moments, double sigma_n_sq) {
    const K63Terms t = gather(moments, sigma_n_sq);
    const double num = t.m63 - 9.0 * t.m42 * t.m21 -
                       6.0 * (t.m20 * std::conj(t.m41)).real() +
                       18.0 * std::norm(t.m20) * t.m21 +
                       12.0 * t.m21 * t.m21 * t.m21;
    return num / (t.denom * t.denom * t.denom);
}

double od_reference(modem::ModulationScheme scheme) {
    const auto& points = modem::constellation(scheme).points;
    const auto m = cumulants::estimate_moments(points, 6);
    return modified_k63(m, 0.0);
}

ChannelTapEstimate estimate_channel(const SampleBlock& samples, int tap_count,
                                    int reference_lag) {
    const auto& r = samples.samples;
    const auto n = static_cast<long>(r.size());
    if (tap_count < 1) throw std::invalid_argument("tap count must be >= 1");
    if (reference_lag < 0 || reference_lag >= tap_count) {
        throw std::invalid_argument("reference lag outside [0, tap_count)");
    }
    if (n <= static_cast<long>(tap_count)) {
        throw std::invalid_argument("block shorter than the tap window");
    }

    const long start = tap_count - 1;
    const double inv_window = 1.0 / static_cast<double>(n - start);
    const long f = reference_lag;

    cvec cube(r.size());
    for (long v = start - f; v < n - f; ++v) {
        cube[static_cast<std::size_t>(v)] = r[static_cast<std::size_t>(v)] *
                                            r[static_cast<std::size_t>(v)] *
                                            r[static_cast<std::size_t>(v)];
    }

    ChannelTapEstimate est;
    est.reference_lag = reference_lag;
    est.taps.resize(static_cast<std::size_t>(tap_count));

    cplx self{};
    for (long v = start; v < n; ++v) {
        self += r[static_cast<std::size_t>(v - f)] *
                cube[static_cast<std::size_t>(v - f)];
    }
    self *= inv_window;
    if (std::abs(self) < 1e-12) {
        throw UnstableReferenceError(
            "fourth-power reference moment indistinguishable from zero");
    }

    for (int k = 0; k < tap_count; ++k) {
        if (k == reference_lag) {
            est.taps[static_cast<std::size_t>(k)] = cplx{1.0, 0.0};
            continue;
        }
        cplx acc{};
        for (long v = start; v < n; ++v) {
            acc += r[static_cast<std::size_t>(v - k)] *
                   cube[static_cast<std::size_t>(v - f)];
        }
        est.taps[static_cast<std::size_t>(k)] = acc * inv_window / self;
    }
    return est;
}

double beta63(const cvec& taps) {
    if (taps.empty()) throw std::invalid_argument("empty tap list");
    double p2 = 0.0, p6 = 0.0;
    for (const cplx& h : taps) {
        const double a2 = std::norm(h);
        p2 += a2;
        p6 += a2 * a2 * a2;
    }
    if (p2 <= 0.0) throw std::invalid_argument("all-zero tap list");
    return p6 / (p2 * p2 * p2);
}

modem::ModulationScheme classify_od(
    const SampleBlock& samples, int tap_count,
    std::span<const modem::ModulationScheme> mod_set, double sigma_n_sq) {
    if (mod_set.empty()) {
        throw std::invalid_argument("empty modulation set");
    }
    const auto moments = cumulants::estimate_moments(samples, 6);
    const double k63 = modified_k63(moments, sigma_n_sq);

    std::vector<double> references;
    references.reserve(mod_set.size());
    for (const auto scheme : mod_set) references.push_back(od_reference(scheme));

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    bool any_stable = false;
    for (int f = 0; f < tap_count; ++f) {
        ChannelTapEstimate est;
        try {
            est = estimate_channel(samples, tap_count, f);
        } catch (const UnstableReferenceError&) {
            continue;
        }
        any_stable = true;
        const double corrected = k63 / beta63(est.taps);
        for (std::size_t i = 0; i < references.size(); ++i) {
            const double residual = std::abs(corrected - references[i]);
            if (residual < best) {
                best = residual;
                best_idx = i;
            }
        }
    }
    if (!any_stable) {
        throw ClassificationFailure(
            "no reference lag produced a usable channel estimate");
    }
    return mod_set[best_idx];
}

}  // namespace cumsig::baseline
