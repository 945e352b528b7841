#include "cumsig/harness.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cumsig/baseline_od.hpp"
#include "cumsig/channel.hpp"
#include "cumsig/config.hpp"
#include "cumsig/cumulants.hpp"
#include "cumsig/parallel.hpp"
#include "cumsig/rng.hpp"

namespace cumsig::harness {

namespace {

constexpr std::array<std::string_view, kMethodCount> kMethodLabels{
    "ws_full", "ws_reduced_14", "ws_reduced_omega", "od63"};

// Seed-derivation domains keeping database streams disjoint from the
// (snr_index, trial_index) trial streams.
constexpr std::uint64_t kAwgnDbDomain = 0x5757AA01;
constexpr std::uint64_t kIdealDbDomain = 0x5757AA02;

bool uses_ws(const std::vector<Method>& methods) {
    for (auto m : methods) {
        if (m != Method::Od63) return true;
    }
    return false;
}

bool has_method(const std::vector<Method>& methods, Method m) {
    for (auto x : methods) {
        if (x == m) return true;
    }
    return false;
}

std::vector<double> project_centroid(const signature::SignatureDatabase& db,
                                     const signature::ReductionMatrix& w) {
    std::vector<double> mean(static_cast<std::size_t>(w.rho), 0.0);
    for (const auto& row : db.rows) {
        const auto p = signature::reduce(row, w);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += p[i];
    }
    const double inv = 1.0 / static_cast<double>(db.rows.size());
    for (auto& v : mean) v *= inv;
    return mean;
}

signature::ClassifierModel reduced_model(
    const std::vector<modem::ModulationScheme>& labels,
    const std::vector<signature::SignatureDatabase>& awgn_dbs,
    signature::ReductionMatrix reduction) {
    signature::ClassifierModel model;
    model.labels = labels;
    model.centroids.reserve(labels.size());
    for (const auto& db : awgn_dbs) {
        model.centroids.push_back(project_centroid(db, reduction));
    }
    model.reduction = std::move(reduction);
    return model;
}

}  // namespace

std::string_view method_label(Method method) {
    return kMethodLabels[static_cast<std::size_t>(method)];
}

std::optional<Method> method_from_label(std::string_view label) {
    for (int i = 0; i < kMethodCount; ++i) {
        if (kMethodLabels[static_cast<std::size_t>(i)] == label) {
            return static_cast<Method>(i);
        }
    }
    return std::nullopt;
}

const std::vector<modem::ModulationScheme>& omega_schemes(
    const std::string& omega_name) {
    using modem::ModulationScheme;
    static const std::vector<ModulationScheme> omega1{
        ModulationScheme::BPSK, ModulationScheme::QPSK};
    static const std::vector<ModulationScheme> omega2{
        ModulationScheme::QPSK, ModulationScheme::QAM16,
        ModulationScheme::QAM64};
    static const std::vector<ModulationScheme> omega3{
        ModulationScheme::BPSK, ModulationScheme::QPSK,
        ModulationScheme::PSK8, ModulationScheme::PAM4,
        ModulationScheme::QAM16};
    if (omega_name == "omega1") return omega1;
    if (omega_name == "omega2") return omega2;
    if (omega_name == "omega3") return omega3;
    throw std::invalid_argument("unknown modulation set: " + omega_name +
                                " (expected omega1|omega2|omega3)");
}

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (int s = -5; s <= 16; ++s) grid.push_back(static_cast<double>(s));
    return grid;
}

void validate(const ExperimentConfig& config) {
    if (config.channel_tag != "awgn" &&
        !channel::is_channel_tag(config.channel_tag)) {
        throw std::invalid_argument("channel: unknown tag '" +
                                    config.channel_tag + "'");
    }
    omega_schemes(config.omega);  // throws on unknown names
    if (config.snr_grid_db.empty()) {
        throw std::invalid_argument("snr: grid must be non-empty");
    }
    if (config.trials < 1) {
        throw std::invalid_argument("trials: must be >= 1");
    }
    if (config.rho < 1 || config.rho > static_cast<int>(kWsDim)) {
        throw std::invalid_argument("rho: must be in [1, 20]");
    }
    if (config.n_symbols < 2) {
        throw std::invalid_argument("block: need at least 2 symbols");
    }
    if (config.sps < 1) {
        throw std::invalid_argument("block: samples per symbol must be >= 1");
    }
    if (config.tap_count < 1) {
        throw std::invalid_argument("lr: estimated tap length must be >= 1");
    }
    if (config.n_estimates != 1) {
        throw std::invalid_argument(
            "ne: only a single channel estimate per block is supported; the "
            "repeated-estimate minimization is deliberately not implemented");
    }
    if (config.threads < 0) {
        throw std::invalid_argument("threads: must be >= 0");
    }
}

std::uint64_t awgn_db_seed(std::uint64_t master_seed,
                           modem::ModulationScheme scheme) {
    return mix_seed(master_seed, kAwgnDbDomain,
                    static_cast<std::uint64_t>(scheme));
}

std::uint64_t ideal_db_seed(std::uint64_t master_seed,
                            modem::ModulationScheme scheme) {
    return mix_seed(master_seed, kIdealDbDomain,
                    static_cast<std::uint64_t>(scheme));
}

ModelBundle assemble_models(
    const ExperimentConfig& config,
    const std::vector<signature::SignatureDatabase>& awgn_dbs,
    std::optional<signature::ReductionMatrix> reduction_14,
    std::optional<signature::ReductionMatrix> reduction_omega) {
    const auto& labels = omega_schemes(config.omega);
    ModelBundle bundle;
    bundle.labels = labels;

    if (uses_ws(config.methods)) {
        if (awgn_dbs.size() != labels.size()) {
            throw std::invalid_argument(
                "need one 20 dB database per modulation in the set");
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (awgn_dbs[i].modulation != labels[i]) {
                throw std::invalid_argument(
                    "database order must match the modulation set order");
            }
            if (awgn_dbs[i].rows.empty()) {
                throw std::invalid_argument("empty signature database for " +
                                            std::string(modem::to_label(
                                                labels[i])));
            }
        }
    }

    if (has_method(config.methods, Method::WsFull)) {
        signature::ClassifierModel model;
        model.labels = labels;
        for (const auto& db : awgn_dbs) {
            const auto c = signature::centroid(db);
            model.centroids.emplace_back(c.begin(), c.end());
        }
        bundle.ws_full = std::move(model);
    }
    if (has_method(config.methods, Method::WsReduced14)) {
        if (!reduction_14) {
            throw std::invalid_argument(
                "ws_reduced_14 requested without a 14-scheme reduction");
        }
        bundle.ws_reduced_14 =
            reduced_model(labels, awgn_dbs, std::move(*reduction_14));
    }
    if (has_method(config.methods, Method::WsReducedOmega)) {
        if (!reduction_omega) {
            throw std::invalid_argument(
                "ws_reduced_omega requested without a set-restricted "
                "reduction");
        }
        bundle.ws_reduced_omega =
            reduced_model(labels, awgn_dbs, std::move(*reduction_omega));
    }
    if (has_method(config.methods, Method::Od63)) {
        bundle.od_references.reserve(labels.size());
        for (auto scheme : labels) {
            bundle.od_references.push_back(baseline::od_reference(scheme));
        }
    }
    return bundle;
}

ModelBundle prepare_models(const ExperimentConfig& config) {
    validate(config);
    const auto& labels = omega_schemes(config.omega);

    std::vector<signature::SignatureDatabase> awgn_dbs;
    if (uses_ws(config.methods)) {
        awgn_dbs.reserve(labels.size());
        for (auto scheme : labels) {
            awgn_dbs.push_back(signature::build_database(
                scheme, "awgn", 2000, 20.0,
                awgn_db_seed(config.master_seed, scheme), config.n_symbols,
                config.sps));
        }
    }

    auto fit_on = [&](const std::vector<modem::ModulationScheme>& schemes,
                      std::string tag) {
        std::vector<signature::WsRow> stacked;
        stacked.reserve(schemes.size() * 2000);
        for (auto scheme : schemes) {
            const auto db = signature::build_database(
                scheme, "ideal", 2000, 20.0,
                ideal_db_seed(config.master_seed, scheme), config.n_symbols,
                config.sps);
            stacked.insert(stacked.end(), db.rows.begin(), db.rows.end());
        }
        return signature::pca_fit(stacked, config.rho, std::move(tag));
    };

    std::optional<signature::ReductionMatrix> reduction_14;
    if (has_method(config.methods, Method::WsReduced14)) {
        reduction_14 = fit_on(modem::all_schemes(), "ideal14");
    }
    std::optional<signature::ReductionMatrix> reduction_omega;
    if (has_method(config.methods, Method::WsReducedOmega)) {
        reduction_omega = fit_on(labels, "ideal-" + config.omega);
    }
    return assemble_models(config, awgn_dbs, std::move(reduction_14),
                           std::move(reduction_omega));
}

TrialOutcome run_trial(const ExperimentConfig& config,
                       const ModelBundle& models, int snr_index,
                       int trial_index) {
    const auto& labels = models.labels;
    const double snr_db =
        config.snr_grid_db[static_cast<std::size_t>(snr_index)];

    Rng rng(mix_seed(config.master_seed,
                     static_cast<std::uint64_t>(snr_index),
                     static_cast<std::uint64_t>(trial_index)));

    TrialOutcome out;
    const std::size_t truth_idx =
        config.stratified
            ? static_cast<std::size_t>(trial_index) % labels.size()
            : static_cast<std::size_t>(rng.next_u64() % labels.size());
    out.truth = labels[truth_idx];

    const std::uint64_t symbol_seed = rng.next_u64();
    auto block = modem::pulse_shape(
        modem::generate_symbols(out.truth, config.n_symbols, symbol_seed),
        config.sps);
    if (config.channel_tag != "awgn") {
        const auto ch = channel::draw_by_tag(
            config.channel_tag, rng, static_cast<int>(block.samples.size()));
        block = channel::apply_channel(block, ch);
    }
    auto [received, noise] = channel::add_awgn(std::move(block), snr_db, rng);

    WaveformSignature ws;
    bool ws_ready = false;
    if (uses_ws(config.methods)) {
        try {
            ws = signature::compute_ws(received, noise.sigma_n_sq);
        } catch (const DegenerateEnergyError&) {
            ws = WaveformSignature{};  // all-zero fallback, event recorded
            out.degenerate = true;
        }
        ws_ready = true;
    }
    (void)ws_ready;

    out.predicted.reserve(config.methods.size());
    for (const auto method : config.methods) {
        std::optional<modem::ModulationScheme> label;
        switch (method) {
            case Method::WsFull:
                label = signature::classify_l1(ws.values, *models.ws_full)
                            .label;
                break;
            case Method::WsReduced14:
                label = signature::classify_reduced(ws,
                                                    *models.ws_reduced_14)
                            .label;
                break;
            case Method::WsReducedOmega:
                label = signature::classify_reduced(ws,
                                                    *models.ws_reduced_omega)
                            .label;
                break;
            case Method::Od63:
                try {
                    label = baseline::classify_od(received, config.tap_count,
                                                  labels, noise.sigma_n_sq);
                } catch (const ClassificationFailure&) {
                } catch (const DegenerateEnergyError&) {
                }
                break;
        }
        out.predicted.push_back(label);
    }
    return out;
}

std::uint64_t CellCounts::total() const {
    std::uint64_t n = 0;
    for (const auto& row : confusion) {
        for (auto v : row) n += v;
    }
    return n;
}

std::uint64_t CellCounts::correct() const {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < confusion.size(); ++i) n += confusion[i][i];
    return n;
}

double CellCounts::pcc() const {
    const auto n = total();
    return n == 0 ? 0.0
                  : static_cast<double>(correct()) / static_cast<double>(n);
}

PccReport run_sweep(const ExperimentConfig& config,
                    const ModelBundle& models) {
    validate(config);
    for (const auto method : config.methods) {
        const bool missing =
            (method == Method::WsFull && !models.ws_full) ||
            (method == Method::WsReduced14 && !models.ws_reduced_14) ||
            (method == Method::WsReducedOmega && !models.ws_reduced_omega) ||
            (method == Method::Od63 && models.od_references.empty());
        if (missing) {
            throw std::invalid_argument(
                std::string("model bundle lacks the parts for method '") +
                std::string(method_label(method)) + "'");
        }
    }

    const auto& labels = models.labels;
    const std::size_t n_labels = labels.size();
    const std::size_t n_methods = config.methods.size();
    const std::size_t n_snr = config.snr_grid_db.size();

    PccReport report;
    report.channel_tag = config.channel_tag;
    report.omega = config.omega;
    report.labels = labels;
    report.snr_grid_db = config.snr_grid_db;
    report.methods = config.methods;
    report.trials = config.trials;
    report.master_seed = config.master_seed;
    report.seed_mix_name = kSeedMixName;
    report.config_digest = config::digest_hex(config);

    CellCounts empty_cell;
    empty_cell.confusion.assign(
        n_labels, std::vector<std::uint64_t>(n_labels + 1, 0));
    report.cells.assign(n_snr, std::vector<CellCounts>(n_methods, empty_cell));

    std::vector<std::size_t> label_index(modem::kSchemeCount, 0);
    for (std::size_t i = 0; i < n_labels; ++i) {
        label_index[static_cast<std::size_t>(labels[i])] = i;
    }

    std::vector<TrialOutcome> outcomes(
        static_cast<std::size_t>(config.trials));
    for (std::size_t s = 0; s < n_snr; ++s) {
        parallel_for(outcomes.size(), config.threads, [&](std::size_t t) {
            outcomes[t] = run_trial(config, models, static_cast<int>(s),
                                    static_cast<int>(t));
        });
        // Accumulation runs in trial order regardless of which worker
        // produced each outcome, so the report never depends on scheduling.
        for (const auto& outcome : outcomes) {
            const std::size_t ti =
                label_index[static_cast<std::size_t>(outcome.truth)];
            for (std::size_t m = 0; m < n_methods; ++m) {
                auto& cell = report.cells[s][m];
                const auto& pred = outcome.predicted[m];
                if (pred) {
                    cell.confusion[ti][label_index[static_cast<std::size_t>(
                        *pred)]] += 1;
                } else {
                    cell.confusion[ti][n_labels] += 1;
                    cell.error_trials += 1;
                }
                if (outcome.degenerate &&
                    config.methods[m] != Method::Od63) {
                    cell.degenerate_trials += 1;
                }
            }
        }
    }
    return report;
}

namespace {

std::string format_snr(double snr_db) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", snr_db);
    return buf;
}

std::string format_pcc(double pcc) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", pcc);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(
    const PccReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string stem = report.channel_tag + "_" + report.omega;
    std::vector<std::filesystem::path> written;

    const auto report_path = out_dir / ("report_" + stem + ".csv");
    {
        auto os = open_out(report_path);
        os << "channel,omega,snr_db,method,pcc,trials,errors\n";
        for (std::size_t s = 0; s < report.snr_grid_db.size(); ++s) {
            for (std::size_t m = 0; m < report.methods.size(); ++m) {
                const auto& cell = report.cells[s][m];
                os << report.channel_tag << ',' << report.omega << ','
                   << format_snr(report.snr_grid_db[s]) << ','
                   << method_label(report.methods[m]) << ','
                   << format_pcc(cell.pcc()) << ',' << cell.total() << ','
                   << cell.error_trials << '\n';
            }
        }
        if (!os) throw std::runtime_error("write failed: " +
                                          report_path.string());
    }
    written.push_back(report_path);

    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        const std::string method{method_label(report.methods[m])};
        const auto curve_path =
            out_dir / ("curve_" + stem + "_" + method + ".dat");
        auto os = open_out(curve_path);
        os << "# channel=" << report.channel_tag
           << " omega=" << report.omega << " method=" << method << '\n';
        for (std::size_t s = 0; s < report.snr_grid_db.size(); ++s) {
            os << format_snr(report.snr_grid_db[s]) << ' '
               << format_pcc(report.cells[s][m].pcc()) << '\n';
        }
        if (!os) throw std::runtime_error("write failed: " +
                                          curve_path.string());
        written.push_back(curve_path);
    }

    const auto confusion_path = out_dir / ("confusion_" + stem + ".csv");
    {
        auto os = open_out(confusion_path);
        os << "channel,omega,snr_db,method,true";
        for (auto label : report.labels) os << ',' << modem::to_label(label);
        os << ",failed\n";
        for (std::size_t s = 0; s < report.snr_grid_db.size(); ++s) {
            for (std::size_t m = 0; m < report.methods.size(); ++m) {
                const auto& cell = report.cells[s][m];
                for (std::size_t t = 0; t < report.labels.size(); ++t) {
                    os << report.channel_tag << ',' << report.omega << ','
                       << format_snr(report.snr_grid_db[s]) << ','
                       << method_label(report.methods[m]) << ','
                       << modem::to_label(report.labels[t]);
                    for (auto v : cell.confusion[t]) os << ',' << v;
                    os << '\n';
                }
            }
        }
        if (!os) throw std::runtime_error("write failed: " +
                                          confusion_path.string());
    }
    written.push_back(confusion_path);
    return written;
}

}  // namespace cumsig::harness
