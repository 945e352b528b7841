#pragma once

// Seeded Monte-Carlo classification sweeps over (channel, modulation set,
// SNR, method), accumulating per-cell confusion counts into a report whose
// bytes depend only on the configuration and master seed — never on thread
// count or scheduling.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cumsig/modem.hpp"
#include "cumsig/signature.hpp"
#include "cumsig/types.hpp"

namespace cumsig::harness {

enum class Method { WsFull, WsReduced14, WsReducedOmega, Od63 };

inline constexpr int kMethodCount = 4;

// Serialized names: "ws_full", "ws_reduced_14", "ws_reduced_omega", "od63".
std::string_view method_label(Method method);
std::optional<Method> method_from_label(std::string_view label);

// Benchmark modulation sets: omega1 = {BPSK, QPSK};
// omega2 = {QPSK, 16QAM, 64QAM}; omega3 = {BPSK, QPSK, 8PSK, 4PAM, 16QAM}.
// Throws std::invalid_argument for unknown names.
const std::vector<modem::ModulationScheme>& omega_schemes(
    const std::string& omega_name);

struct ExperimentConfig {
    std::string channel_tag = "clarke";  // awgn|clarke|turin|clarke5|70|200
    std::string omega = "omega1";
    std::vector<double> snr_grid_db;     // empty => default_snr_grid()
    int trials = 2000;
    std::vector<Method> methods{Method::WsFull};
    int rho = 3;            // reduced-signature dimension
    int n_symbols = 640;    // symbols per trial block
    int sps = kDefaultSps;
    int tap_count = 10;     // estimated tap length for the od63 baseline
    int n_estimates = 1;    // repeated-estimate hook; only 1 is supported
    std::uint64_t master_seed = 0;
    bool stratified = false;  // exact per-class counts instead of i.i.d. draws
    int threads = 0;          // sweep workers; 0 = hardware concurrency
};

// -5..16 dB in 1 dB steps: covers every summary point (5, 10, 16 dB).
std::vector<double> default_snr_grid();

// Rejects out-of-range fields with a message naming the offending key;
// n_estimates > 1 is rejected as unimplemented by design.
void validate(const ExperimentConfig& config);

// Seeds for the model-building databases, derived from the master seed so a
// whole experiment is reproducible from one number. The CLI uses the same
// derivations, so on-disk artifacts match in-memory builds.
std::uint64_t awgn_db_seed(std::uint64_t master_seed,
                           modem::ModulationScheme scheme);
std::uint64_t ideal_db_seed(std::uint64_t master_seed,
                            modem::ModulationScheme scheme);

// Everything a sweep needs besides per-trial randomness. Models are
// immutable during sweeps and safe to share across workers.
struct ModelBundle {
    std::vector<modem::ModulationScheme> labels;  // omega order
    std::optional<signature::ClassifierModel> ws_full;
    std::optional<signature::ClassifierModel> ws_reduced_14;
    std::optional<signature::ClassifierModel> ws_reduced_omega;
    std::vector<double> od_references;  // aligned with labels; empty if unused
};

// Assemble a bundle from already-built parts. awgn_dbs must be aligned with
// the omega scheme order (20 dB AWGN captures, one per scheme). Reduction
// matrices are only required for the methods that use them; reduced-space
// centroids are the means of the projected database rows.
ModelBundle assemble_models(
    const ExperimentConfig& config,
    const std::vector<signature::SignatureDatabase>& awgn_dbs,
    std::optional<signature::ReductionMatrix> reduction_14,
    std::optional<signature::ReductionMatrix> reduction_omega);

// Build every required model in memory from the config seeds: 20 dB AWGN
// databases for centroids, ideal databases for the loading fits (all 14
// schemes for ws_reduced_14, the omega subset for ws_reduced_omega).
ModelBundle prepare_models(const ExperimentConfig& config);

struct TrialOutcome {
    modem::ModulationScheme truth;
    // Aligned with config.methods; nullopt records a classification failure.
    std::vector<std::optional<modem::ModulationScheme>> predicted;
    bool degenerate = false;  // zero-signature fallback used (deep fade)
};

// One seeded trial: draw the true scheme, generate a block, pass it through
// a fresh channel realization, add AWGN at snr_grid_db[snr_index], classify
// with every requested method. Deterministic in (master_seed, snr_index,
// trial_index); the per-trial seed is mix(master_seed, snr_index,
// trial_index).
TrialOutcome run_trial(const ExperimentConfig& config,
                       const ModelBundle& models, int snr_index,
                       int trial_index);

struct CellCounts {
    // confusion[truth][pred], indexed by omega order; the extra last column
    // counts classification failures, so each row sums to that class's
    // trial count.
    std::vector<std::vector<std::uint64_t>> confusion;
    std::uint64_t error_trials = 0;       // classification failures
    std::uint64_t degenerate_trials = 0;  // zero-signature fallbacks

    std::uint64_t total() const;
    std::uint64_t correct() const;
    double pcc() const;  // correct / total under equal priors
};

struct PccReport {
    std::string channel_tag;
    std::string omega;
    std::vector<modem::ModulationScheme> labels;
    std::vector<double> snr_grid_db;
    std::vector<Method> methods;
    std::vector<std::vector<CellCounts>> cells;  // [snr_index][method_index]
    int trials = 0;
    std::uint64_t master_seed = 0;
    std::string seed_mix_name;   // provenance: named seed-mixing function
    std::string config_digest;   // provenance: hex digest of the config text
};

// Full sweep over the SNR grid. Trials are independent tasks merged by
// integer addition, so any worker count or schedule yields the identical
// report.
PccReport run_sweep(const ExperimentConfig& config, const ModelBundle& models);

// Write report files into out_dir and return their paths in a fixed order:
//  - report_<channel>_<omega>.csv: channel, omega, snr_db, method, pcc
//    (4 decimals), trials, errors;
//  - curve_<channel>_<omega>_<method>.dat per method: "snr_db pcc" rows
//    under a comment header naming channel/omega/method;
//  - confusion_<channel>_<omega>.csv: per-cell confusion rows, one line per
//    (snr, method, true label), with a trailing "failed" column.
std::vector<std::filesystem::path> emit_report(
    const PccReport& report, const std::filesystem::path& out_dir);

}  // namespace cumsig::harness
