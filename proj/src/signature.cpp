#include "cumsig/signature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cumsig/channel.hpp"
#include "cumsig/cumulants.hpp"
#include "cumsig/parallel.hpp"
#include "cumsig/rng.hpp"

namespace cumsig::signature {

WaveformSignature compute_ws(const SampleBlock& samples, double sigma_n_sq) {
    if (samples.samples.size() < 2) {
        throw std::invalid_argument("need at least two samples");
    }
    const auto m = cumulants::estimate_moments(samples);
    const double k21 = m.get(2, 1).real();
    WaveformSignature ws;
    for (std::size_t i = 0; i < kWsPairs.size(); ++i) {
        const auto [n, q] = kWsPairs[i];
        ws.values[i] =
            cumulants::normalize(cumulants::cumulant_closed(m, n, q), k21,
                                 sigma_n_sq, n);
    }
    return ws;
}

SignatureDatabase build_database(modem::ModulationScheme scheme,
                                 const std::string& channel_tag, int count,
                                 double snr_db, std::uint64_t seed,
                                 int n_symbols, int sps) {
    const bool ideal = channel_tag == "ideal";
    const bool awgn_only = channel_tag == "awgn";
    if (!ideal && !awgn_only && !channel::is_channel_tag(channel_tag)) {
        throw std::invalid_argument("unknown channel tag: " + channel_tag);
    }
    if (count < 0) throw std::invalid_argument("row count must be >= 0");

    SignatureDatabase db;
    db.modulation = scheme;
    db.channel_tag = channel_tag;
    db.build_snr_db = ideal ? std::numeric_limits<double>::infinity() : snr_db;
    db.seed = seed;
    db.rows.resize(static_cast<std::size_t>(count));

    // Row i depends only on mix(seed, i), so rows can be filled on any
    // schedule and the database still comes out bit-identical.
    parallel_for(static_cast<std::size_t>(count), 0, [&](std::size_t i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const std::uint64_t symbol_seed = rng.next_u64();
        auto block = modem::pulse_shape(
            modem::generate_symbols(scheme, n_symbols, symbol_seed), sps);
        double sigma_n_sq = 0.0;
        if (!ideal) {
            if (!awgn_only) {
                const auto ch = channel::draw_by_tag(
                    channel_tag, rng, static_cast<int>(block.samples.size()));
                block = channel::apply_channel(block, ch);
            }
            auto [noisy, spec] =
                channel::add_awgn(std::move(block), snr_db, rng);
            block = std::move(noisy);
            sigma_n_sq = spec.sigma_n_sq;
        }
        db.rows[i] = compute_ws(block, sigma_n_sq).values;
    });
    return db;
}

WsRow centroid(const SignatureDatabase& db) {
    if (db.rows.empty()) {
        throw std::invalid_argument("cannot take the centroid of an empty database");
    }
    WsRow mean{};
    for (const auto& row : db.rows) {
        for (std::size_t i = 0; i < kWsDim; ++i) mean[i] += row[i];
    }
    const double inv = 1.0 / static_cast<double>(db.rows.size());
    for (auto& v : mean) v *= inv;
    return mean;
}

ReductionMatrix pca_fit(const std::vector<WsRow>& stacked, int rho,
                        std::string source_tag) {
    if (rho < 1 || rho > static_cast<int>(kWsDim)) {
        throw std::invalid_argument("rho must be in [1, 20]");
    }
    if (stacked.size() < kWsDim) {
        throw std::invalid_argument("need at least 20 rows to fit loadings");
    }
    const auto n_rows = static_cast<Eigen::Index>(stacked.size());
    Eigen::MatrixXd x(n_rows, static_cast<Eigen::Index>(kWsDim));
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(kWsDim); ++c) {
            x(r, c) = stacked[static_cast<std::size_t>(r)]
                             [static_cast<std::size_t>(c)];
        }
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const int rank = static_cast<int>(svd.rank());
    if (rank < rho) {
        throw std::invalid_argument(
            "data rank " + std::to_string(rank) +
            " is below the requested component count " + std::to_string(rho));
    }

    const auto& v = svd.matrixV();
    const auto& sv = svd.singularValues();
    const double total_var = sv.squaredNorm();

    ReductionMatrix w;
    w.rho = rho;
    w.source_tag = std::move(source_tag);
    w.columns.resize(static_cast<std::size_t>(rho));
    w.explained.resize(static_cast<std::size_t>(rho));
    for (int j = 0; j < rho; ++j) {
        Eigen::VectorXd col = v.col(j);
        Eigen::Index peak = 0;
        col.cwiseAbs().maxCoeff(&peak);
        if (col(peak) < 0.0) col = -col;
        for (std::size_t i = 0; i < kWsDim; ++i) {
            w.columns[static_cast<std::size_t>(j)][i] =
                col(static_cast<Eigen::Index>(i));
        }
        w.explained[static_cast<std::size_t>(j)] =
            sv(j) * sv(j) / total_var;
    }
    return w;
}

std::vector<double> reduce(const WsRow& ws, const ReductionMatrix& w) {
    std::vector<double> out(static_cast<std::size_t>(w.rho), 0.0);
    for (int j = 0; j < w.rho; ++j) {
        double acc = 0.0;
        const auto& col = w.columns[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < kWsDim; ++i) acc += ws[i] * col[i];
        out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

Decision classify_l1(std::span<const double> ws, const ClassifierModel& model) {
    if (model.labels.empty() || model.labels.size() != model.centroids.size()) {
        throw std::invalid_argument("malformed classifier model");
    }
    Decision d;
    d.distances.reserve(model.labels.size());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t k = 0; k < model.centroids.size(); ++k) {
        const auto& cen = model.centroids[k];
        if (cen.size() != ws.size()) {
            throw std::invalid_argument("signature/centroid dimension mismatch");
        }
        double dist = 0.0;
        for (std::size_t i = 0; i < cen.size(); ++i) {
            dist += std::abs(cen[i] - ws[i]);
        }
        d.distances.push_back(dist);
        if (dist < best) {
            best = dist;
            best_idx = k;
        } else if (dist == best) {
            d.tie = true;
        }
    }
    d.label = model.labels[best_idx];
    return d;
}

Decision classify_reduced(const WaveformSignature& ws,
                          const ClassifierModel& model) {
    if (!model.reduction) {
        throw std::invalid_argument("model carries no reduction matrix");
    }
    const auto projected = reduce(ws.values, *model.reduction);
    return classify_l1(projected, model);
}

// ------------------------------------------------------------ persistence --
namespace {

constexpr std::uint16_t kDbVersion = 1;
constexpr std::uint16_t kPcaVersion = 1;

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void put_u16(std::ostream& os, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    put_bytes(os, b, 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(os, b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(os, b, 8);
}

void put_f64(std::ostream& os, double v) {
    put_u64(os, std::bit_cast<std::uint64_t>(v));
}

void put_string(std::ostream& os, const std::string& s) {
    if (s.size() > 0xffff) throw std::invalid_argument("string too long");
    put_u16(os, static_cast<std::uint16_t>(s.size()));
    put_bytes(os, s.data(), s.size());
}

void get_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw std::runtime_error("truncated file");
}

std::uint16_t get_u16(std::istream& is) {
    unsigned char b[2];
    get_bytes(is, b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    get_bytes(is, b, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    get_bytes(is, b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& is) {
    return std::bit_cast<double>(get_u64(is));
}

std::string get_string(std::istream& is) {
    const std::uint16_t len = get_u16(is);
    std::string s(len, '\0');
    if (len > 0) get_bytes(is, s.data(), len);
    return s;
}

void check_magic(std::istream& is, const char expect[4],
                 const std::string& what) {
    char magic[4];
    get_bytes(is, magic, 4);
    if (std::memcmp(magic, expect, 4) != 0) {
        throw std::runtime_error("not a " + what + " file (bad magic)");
    }
}

}  // namespace

void save_database(const SignatureDatabase& db,
                   const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    put_bytes(os, "WSDB", 4);
    put_u16(os, kDbVersion);
    put_string(os, std::string(modem::to_label(db.modulation)));
    put_string(os, db.channel_tag);
    put_f64(os, db.build_snr_db);
    put_u32(os, static_cast<std::uint32_t>(db.rows.size()));
    put_u16(os, static_cast<std::uint16_t>(kWsDim));
    put_u64(os, db.seed);
    for (const auto& row : db.rows) {
        for (double v : row) put_f64(os, v);
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

SignatureDatabase load_database(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    check_magic(is, "WSDB", "signature database");
    const auto version = get_u16(is);
    if (version != kDbVersion) {
        throw std::runtime_error("unsupported database version " +
                                 std::to_string(version));
    }
    SignatureDatabase db;
    const std::string label = get_string(is);
    const auto scheme = modem::scheme_from_label(label);
    if (!scheme) {
        throw std::runtime_error("unknown modulation label in file: " + label);
    }
    db.modulation = *scheme;
    db.channel_tag = get_string(is);
    db.build_snr_db = get_f64(is);
    const auto count = get_u32(is);
    const auto dim = get_u16(is);
    if (dim != kWsDim) {
        throw std::runtime_error("unexpected signature dimension " +
                                 std::to_string(dim));
    }
    db.seed = get_u64(is);
    db.rows.resize(count);
    for (auto& row : db.rows) {
        for (auto& v : row) v = get_f64(is);
    }
    return db;
}

void export_database_csv(const SignatureDatabase& db,
                         const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < kWsPairs.size(); ++i) {
        os << (i ? "," : "") << 'k' << kWsPairs[i].first << '_'
           << kWsPairs[i].second;
    }
    os << '\n';
    char buf[32];
    for (const auto& row : db.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            os << (i ? "," : "") << buf;
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void save_reduction(const ReductionMatrix& w,
                    const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    put_bytes(os, "WSPC", 4);
    put_u16(os, kPcaVersion);
    put_string(os, w.source_tag);
    put_u16(os, static_cast<std::uint16_t>(w.rho));
    put_u16(os, static_cast<std::uint16_t>(kWsDim));
    for (double v : w.explained) put_f64(os, v);
    for (std::size_t i = 0; i < kWsDim; ++i) {
        for (int j = 0; j < w.rho; ++j) {
            put_f64(os, w.columns[static_cast<std::size_t>(j)][i]);
        }
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

ReductionMatrix load_reduction(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    check_magic(is, "WSPC", "reduction");
    const auto version = get_u16(is);
    if (version != kPcaVersion) {
        throw std::runtime_error("unsupported reduction version " +
                                 std::to_string(version));
    }
    ReductionMatrix w;
    w.source_tag = get_string(is);
    w.rho = get_u16(is);
    const auto dim = get_u16(is);
    if (dim != kWsDim) {
        throw std::runtime_error("unexpected loading dimension " +
                                 std::to_string(dim));
    }
    w.explained.resize(static_cast<std::size_t>(w.rho));
    for (auto& v : w.explained) v = get_f64(is);
    w.columns.resize(static_cast<std::size_t>(w.rho));
    for (std::size_t i = 0; i < kWsDim; ++i) {
        for (int j = 0; j < w.rho; ++j) {
            w.columns[static_cast<std::size_t>(j)][i] = get_f64(is);
        }
    }
    return w;
}

}  // namespace cumsig::signature
