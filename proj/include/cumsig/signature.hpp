// Waveform-signature features, labeled databases, PCA reduction, and the
// L1 nearest-centroid classifiers.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cumsig/modem.hpp"
#include "cumsig/types.hpp"
#include "cumsig/ws_vector.hpp"

namespace cumsig::signature {

using WsRow = std::array<double, kWsDim>;

// Full feature pipeline for one received block: moments -> 20 closed-form
// cumulants -> energy/magnitude normalization with the supplied noise power.
// Throws DegenerateEnergyError when the block's energy does not exceed
// sigma_n_sq.
WaveformSignature compute_ws(const SampleBlock& samples, double sigma_n_sq);

struct SignatureDatabase {
    modem::ModulationScheme modulation;
    std::string channel_tag;    // "ideal", "awgn", or a channel name
    double build_snr_db = 20.0;
    std::uint64_t seed = 0;
    std::vector<WsRow> rows;
};

// count independent blocks of n_symbols symbols through the named channel at
// snr_db, one signature row per block. channel_tag:
//   "ideal"  — h = 1, no noise (snr_db ignored);
//   "awgn"   — h = 1 plus AWGN at snr_db;
//   "clarke" | "turin" | "clarke5" | "clarke70" | "clarke200" — fading + AWGN.
// Row i is derived from mix(seed, i): identical inputs give identical rows
// regardless of build order.
SignatureDatabase build_database(modem::ModulationScheme scheme,
                                 const std::string& channel_tag,
                                 int count = 2000, double snr_db = 20.0,
                                 std::uint64_t seed = 0, int n_symbols = 640,
                                 int sps = kDefaultSps);

// Arithmetic column mean. Throws std::invalid_argument on an empty database.
WsRow centroid(const SignatureDatabase& db);

struct ReductionMatrix {
    int rho = 0;
    std::string source_tag;            // e.g. "ideal14", "ideal-omega2"
    std::vector<WsRow> columns;        // rho orthonormal loading columns
    std::vector<double> explained;     // variance fractions, non-increasing
};

// PCA of stacked signature rows: columns are mean-centered, loadings come
// from the SVD, ordered by singular value; each column's largest-magnitude
// entry is made positive. Throws std::invalid_argument on bad rho/row count
// and a reduced-rank error (listing the achieved rank) when rank < rho.
ReductionMatrix pca_fit(const std::vector<WsRow>& stacked, int rho,
                        std::string source_tag);

// Projection of the raw (uncentered) signature onto the loading columns.
std::vector<double> reduce(const WsRow& ws, const ReductionMatrix& w);

struct ClassifierModel {
    std::vector<modem::ModulationScheme> labels;
    std::vector<std::vector<double>> centroids;  // one per label, equal dims
    std::optional<ReductionMatrix> reduction;    // present for reduced models
};

struct Decision {
    modem::ModulationScheme label;
    std::vector<double> distances;  // aligned with model.labels
    bool tie = false;               // another label achieved the exact minimum
};

// argmin over labels of the L1 distance to each centroid; ties go to the
// earliest label in model order, with the tie flagged.
Decision classify_l1(std::span<const double> ws, const ClassifierModel& model);

// Projects the full signature through model.reduction, then classifies in
// the reduced space.
Decision classify_reduced(const WaveformSignature& ws,
                          const ClassifierModel& model);

// ------------------------------------------------------------ persistence --
// Binary database format (little-endian): magic "WSDB", version u16,
// modulation label (u16 length + UTF-8), channel tag (u16 length + UTF-8),
// build SNR f64, row count u32, dim u16 (= 20), seed u64, then rows
// row-major f64.
void save_database(const SignatureDatabase& db,
                   const std::filesystem::path& path);
SignatureDatabase load_database(const std::filesystem::path& path);

// Lossless CSV (17 significant digits), one header line naming the entries.
void export_database_csv(const SignatureDatabase& db,
                         const std::filesystem::path& path);

// Reduction file: magic "WSPC", version u16, source tag (u16 length + UTF-8),
// rho u16, dim u16 (= 20), explained fractions (rho f64), loadings row-major
// (20 x rho f64).
void save_reduction(const ReductionMatrix& w,
                    const std::filesystem::path& path);
ReductionMatrix load_reduction(const std::filesystem::path& path);

}  // namespace cumsig::signature
