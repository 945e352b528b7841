// Command-line front end: builds signature databases, fits reductions, runs
// Monte-Carlo sweeps, renders summary tables, and inspects database files.
//
// Exit codes: 0 success, 2 usage error, 3 missing prerequisite, 4 I/O error.

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cumsig/baseline_od.hpp"
#include "cumsig/channel.hpp"
#include "cumsig/config.hpp"
#include "cumsig/harness.hpp"
#include "cumsig/rng.hpp"
#include "cumsig/signature.hpp"

namespace fs = std::filesystem;
using namespace cumsig;

namespace {

constexpr const char* kToolVersion = "cumsig 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPrereq = 3;
constexpr int kExitIo = 4;

// A required artifact is absent; the message names the command that creates
// it.
struct PrereqError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Guards an output directory against concurrent invocations. The lock file
// is created exclusively and removed on scope exit; a leftover lock from a
// crashed run must be removed by hand.
class DirLock {
  public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".cumsig.lock") {
        fs::create_directories(dir);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            throw std::runtime_error(
                "output directory is locked by another invocation (" +
                path_.string() + "); remove the file if no run is active");
        }
    }
    ~DirLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

  private:
    fs::path path_;
    int fd_ = -1;
};

std::string scheme_list() {
    std::string out;
    for (auto s : modem::all_schemes()) {
        if (!out.empty()) out += ", ";
        out += modem::to_label(s);
    }
    return out;
}

modem::ModulationScheme parse_scheme(const std::string& label) {
    const auto scheme = modem::scheme_from_label(label);
    if (!scheme) {
        throw std::invalid_argument("unknown modulation '" + label +
                                    "' (valid: " + scheme_list() +
                                    ", or all14)");
    }
    return *scheme;
}

std::uint64_t db_build_seed(std::uint64_t master, const std::string& tag,
                            modem::ModulationScheme scheme) {
    return tag == "ideal" ? harness::ideal_db_seed(master, scheme)
                          : harness::awgn_db_seed(master, scheme);
}

fs::path db_path(const fs::path& out, const std::string& label,
                 const std::string& tag) {
    return out / "db" / (label + "_" + tag + ".wsdb");
}

fs::path pca_path(const fs::path& out, const std::string& tag, int rho) {
    return out / "pca" / (tag + "_rho" + std::to_string(rho) + ".wspc");
}

// ----------------------------------------------------------------- build-db
int cmd_build_db(const fs::path& out, const std::string& scheme_arg,
                 const std::string& tag, int count, double snr_db,
                 std::uint64_t seed, bool force) {
    if (tag != "ideal" && tag != "awgn" && !channel::is_channel_tag(tag)) {
        throw std::invalid_argument(
            "unknown channel tag '" + tag +
            "' (valid: ideal, awgn, clarke, turin, clarke5, clarke70, "
            "clarke200)");
    }
    std::vector<modem::ModulationScheme> schemes;
    if (scheme_arg == "all14") {
        schemes = modem::all_schemes();
    } else {
        schemes.push_back(parse_scheme(scheme_arg));
    }

    DirLock lock(out);
    fs::create_directories(out / "db");
    for (auto scheme : schemes) {
        const std::string label{modem::to_label(scheme)};
        const auto path = db_path(out, label, tag);
        if (fs::exists(path) && !force) {
            throw std::invalid_argument(path.string() +
                                        " exists; pass --force to overwrite");
        }
        const auto db = signature::build_database(
            scheme, tag, count, snr_db, db_build_seed(seed, tag, scheme));
        signature::save_database(db, path);
        std::cout << "wrote " << path.string() << " (" << db.rows.size()
                  << " rows)\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------ fit-pca
int cmd_fit_pca(const fs::path& out, const std::string& subset, int rho,
                bool force) {
    std::vector<modem::ModulationScheme> schemes;
    std::string tag;
    if (subset == "all14") {
        schemes = modem::all_schemes();
        tag = "ideal14";
    } else {
        schemes = harness::omega_schemes(subset);  // throws if unknown
        tag = "ideal-" + subset;
    }

    DirLock lock(out);
    std::vector<signature::WsRow> stacked;
    for (auto scheme : schemes) {
        const std::string label{modem::to_label(scheme)};
        const auto path = db_path(out, label, "ideal");
        if (!fs::exists(path)) {
            throw PrereqError("missing " + path.string() +
                              "; run: cumsig build-db all14 ideal");
        }
        const auto db = signature::load_database(path);
        stacked.insert(stacked.end(), db.rows.begin(), db.rows.end());
    }
    const auto reduction = signature::pca_fit(stacked, rho, tag);

    fs::create_directories(out / "pca");
    const auto path = pca_path(out, tag, rho);
    if (fs::exists(path) && !force) {
        throw std::invalid_argument(path.string() +
                                    " exists; pass --force to overwrite");
    }
    signature::save_reduction(reduction, path);
    std::cout << "wrote " << path.string() << " (rho " << reduction.rho
              << ", explained";
    for (double v : reduction.explained) {
        std::printf(" %.4f", v);
    }
    std::cout << ")\n";
    return kExitOk;
}

// -------------------------------------------------------------------- sweep
int cmd_sweep(const fs::path& out, const harness::ExperimentConfig& cfg) {
    harness::validate(cfg);
    const auto& labels = harness::omega_schemes(cfg.omega);

    bool needs_ws = false, needs_14 = false, needs_omega = false;
    for (auto m : cfg.methods) {
        needs_ws |= m != harness::Method::Od63;
        needs_14 |= m == harness::Method::WsReduced14;
        needs_omega |= m == harness::Method::WsReducedOmega;
    }

    DirLock lock(out);
    std::vector<signature::SignatureDatabase> awgn_dbs;
    std::vector<std::string> artifact_notes;
    if (needs_ws) {
        for (auto scheme : labels) {
            const std::string label{modem::to_label(scheme)};
            const auto path = db_path(out, label, "awgn");
            if (!fs::exists(path)) {
                throw PrereqError(
                    "missing " + path.string() +
                    "; run: cumsig build-db all14 awgn --seed " +
                    std::to_string(cfg.master_seed));
            }
            awgn_dbs.push_back(signature::load_database(path));
            artifact_notes.push_back(
                "db: " + path.string() + " (seed " +
                std::to_string(awgn_dbs.back().seed) + ", rows " +
                std::to_string(awgn_dbs.back().rows.size()) + ")");
        }
    }
    std::optional<signature::ReductionMatrix> reduction_14;
    if (needs_14) {
        const auto path = pca_path(out, "ideal14", cfg.rho);
        if (!fs::exists(path)) {
            throw PrereqError("missing " + path.string() +
                              "; run: cumsig fit-pca all14 --rho " +
                              std::to_string(cfg.rho));
        }
        reduction_14 = signature::load_reduction(path);
        artifact_notes.push_back("pca: " + path.string());
    }
    std::optional<signature::ReductionMatrix> reduction_omega;
    if (needs_omega) {
        const auto path = pca_path(out, "ideal-" + cfg.omega, cfg.rho);
        if (!fs::exists(path)) {
            throw PrereqError("missing " + path.string() +
                              "; run: cumsig fit-pca " + cfg.omega +
                              " --rho " + std::to_string(cfg.rho));
        }
        reduction_omega = signature::load_reduction(path);
        artifact_notes.push_back("pca: " + path.string());
    }

    const auto models = harness::assemble_models(
        cfg, awgn_dbs, std::move(reduction_14), std::move(reduction_omega));
    const auto report = harness::run_sweep(cfg, models);

    const fs::path report_dir =
        out / "reports" / (cfg.channel_tag + "_" + cfg.omega);
    const auto written = harness::emit_report(report, report_dir);

    // Count unique zero-signature fallbacks (identical across ws methods).
    std::uint64_t degenerate = 0;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        if (report.methods[m] == harness::Method::Od63) continue;
        degenerate = 0;
        for (const auto& row : report.cells) {
            degenerate += row[m].degenerate_trials;
        }
        break;
    }

    const auto manifest_path = report_dir / "manifest.txt";
    {
        std::ofstream os(manifest_path);
        if (!os) {
            throw std::runtime_error("cannot write " +
                                     manifest_path.string());
        }
        os << "# " << kToolVersion << " run manifest; re-runnable via:\n";
        os << "#   cumsig sweep --config " << manifest_path.string()
           << " --out " << out.string() << "\n";
        os << "# provenance:\n";
        os << "#   seed_mix = " << report.seed_mix_name << "\n";
        os << "#   config_digest = " << report.config_digest << "\n";
        os << "#   snr_offset_db = 0\n";
        os << "#   degenerate_fallbacks = " << degenerate << "\n";
        for (const auto& note : artifact_notes) os << "#   " << note << "\n";
        for (const auto& path : written) {
            os << "#   out: " << path.string() << "\n";
        }
        os << config::snapshot(cfg);
        if (!os) {
            throw std::runtime_error("write failed: " +
                                     manifest_path.string());
        }
    }

    for (const auto& path : written) {
        std::cout << "wrote " << path.string() << '\n';
    }
    std::cout << "wrote " << manifest_path.string() << '\n';
    return kExitOk;
}

// ------------------------------------------------------------------- tables
struct TableKey {
    std::string channel, omega;
    bool operator<(const TableKey& o) const {
        return channel != o.channel ? channel < o.channel : omega < o.omega;
    }
};

int cmd_tables(const std::vector<std::string>& report_files,
               const std::string& csv_out) {
    std::vector<TableKey> row_order;
    std::map<TableKey, std::map<std::string, std::map<int, double>>> cells;

    for (const auto& file : report_files) {
        std::ifstream is(file);
        if (!is) throw std::runtime_error("cannot read " + file);
        std::string line;
        bool first = true;
        while (std::getline(is, line)) {
            if (first) {
                first = false;  // header
                continue;
            }
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::istringstream ls(line);
            std::string field;
            while (std::getline(ls, field, ',')) fields.push_back(field);
            if (fields.size() < 7) {
                throw std::runtime_error(file + ": malformed report row: " +
                                         line);
            }
            const TableKey key{fields[0], fields[1]};
            const double snr = std::stod(fields[2]);
            const int snr_int = static_cast<int>(std::lround(snr));
            if (std::abs(snr - snr_int) > 1e-9) continue;
            bool seen = false;
            for (const auto& k : row_order) {
                if (!(k < key) && !(key < k)) seen = true;
            }
            if (!seen) row_order.push_back(key);
            cells[key][fields[3]][snr_int] = std::stod(fields[4]);
        }
    }

    constexpr std::array<int, 3> kSummarySnrs{5, 10, 16};
    constexpr std::array<const char*, 4> kColumns{
        "ws_full", "ws_reduced_14", "ws_reduced_omega", "od63"};

    auto cell_text = [&](const TableKey& key, const char* method,
                         int snr) -> std::string {
        const auto mi = cells.find(key);
        if (mi == cells.end()) return "-";
        const auto ci = mi->second.find(method);
        if (ci == mi->second.end()) return "-";
        const auto si = ci->second.find(snr);
        if (si == ci->second.end()) return "-";
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.1f", 100.0 * si->second);
        return buf;
    };

    for (const int snr : kSummarySnrs) {
        std::printf("P_cc (%%) at %d dB\n", snr);
        std::printf("%-10s %-8s %10s %14s %17s %8s\n", "channel", "set",
                    "ws_full", "ws_reduced_14", "ws_reduced_omega", "od63");
        for (const auto& key : row_order) {
            std::printf("%-10s %-8s %10s %14s %17s %8s\n",
                        key.channel.c_str(), key.omega.c_str(),
                        cell_text(key, kColumns[0], snr).c_str(),
                        cell_text(key, kColumns[1], snr).c_str(),
                        cell_text(key, kColumns[2], snr).c_str(),
                        cell_text(key, kColumns[3], snr).c_str());
        }
        std::printf("\n");
    }

    if (!csv_out.empty()) {
        std::ofstream os(csv_out);
        if (!os) throw std::runtime_error("cannot write " + csv_out);
        os << "snr_db,channel,omega,ws_full,ws_reduced_14,ws_reduced_omega,"
              "od63\n";
        for (const int snr : kSummarySnrs) {
            for (const auto& key : row_order) {
                os << snr << ',' << key.channel << ',' << key.omega;
                for (const auto* method : kColumns) {
                    os << ',' << cell_text(key, method, snr);
                }
                os << '\n';
            }
        }
        if (!os) throw std::runtime_error("write failed: " + csv_out);
        std::cout << "wrote " << csv_out << '\n';
    }
    return kExitOk;
}

// --------------------------------------------------------------- inspect-db
int cmd_inspect_db(const std::string& file) {
    const auto db = signature::load_database(file);
    std::cout << "file: " << file << '\n';
    std::cout << "modulation: " << modem::to_label(db.modulation) << '\n';
    std::cout << "channel: " << db.channel_tag << '\n';
    std::printf("build_snr_db: %g\n", db.build_snr_db);
    std::cout << "rows: " << db.rows.size() << '\n';
    std::cout << "dim: " << kWsDim << '\n';
    std::cout << "seed: " << db.seed << '\n';
    std::cout << "column means:\n";
    for (std::size_t i = 0; i < kWsDim; ++i) {
        double mean = 0.0;
        for (const auto& row : db.rows) mean += row[i];
        if (!db.rows.empty()) mean /= static_cast<double>(db.rows.size());
        std::printf("  k%d_%d %.6g\n", kWsPairs[i].first, kWsPairs[i].second,
                    mean);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolVersion) +
                 " — cumulant-signature modulation classification"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --out appear after the subcommand too
    std::string out_dir = "./artifacts";
    app.add_option("--out", out_dir, "artifact directory")
        ->capture_default_str();

    // build-db -------------------------------------------------------------
    auto* build = app.add_subcommand(
        "build-db", "build signature database files (WSDB)");
    std::string build_scheme, build_tag;
    int build_count = 2000;
    double build_snr = 20.0;
    std::string build_seed = "0";
    bool build_force = false;
    build->add_option("scheme", build_scheme,
                      "modulation label or all14")->required();
    build->add_option("channel", build_tag,
                      "ideal|awgn|clarke|turin|clarke5|clarke70|clarke200")
        ->required();
    build->add_option("--count", build_count, "rows per database")
        ->capture_default_str();
    build->add_option("--snr", build_snr, "build SNR in dB (ignored by ideal)")
        ->capture_default_str();
    build->add_option("--seed", build_seed,
                      "master seed; per-scheme seeds derive from it");
    build->add_flag("--force", build_force, "overwrite existing files");

    // fit-pca --------------------------------------------------------------
    auto* fit = app.add_subcommand(
        "fit-pca", "fit reduction loadings from ideal databases (WSPC)");
    std::string fit_subset;
    int fit_rho = 3;
    bool fit_force = false;
    fit->add_option("subset", fit_subset, "all14|omega1|omega2|omega3")
        ->required();
    fit->add_option("--rho", fit_rho, "number of loading columns")
        ->capture_default_str();
    fit->add_flag("--force", fit_force, "overwrite existing files");

    // sweep ----------------------------------------------------------------
    auto* sweep = app.add_subcommand(
        "sweep", "run a Monte-Carlo classification sweep");
    std::string sweep_config;
    std::map<std::string, std::string> sweep_overrides;
    auto add_override = [&](const std::string& key, const std::string& help) {
        sweep_overrides[key] = {};
        return sweep
            ->add_option("--" + key, sweep_overrides[key], help)
            ->expected(1);
    };
    sweep->add_option("--config", sweep_config, "config file (key = value)");
    add_override("channel", "awgn|clarke|turin|clarke5|clarke70|clarke200");
    add_override("omega", "omega1|omega2|omega3");
    add_override("methods",
                 "comma list of ws_full|ws_reduced_14|ws_reduced_omega|od63, "
                 "or all");
    add_override("trials", "Monte-Carlo trials per SNR point");
    add_override("snr", "SNR grid: start:stop:step or comma list (dB)");
    add_override("rho", "reduced-signature dimension");
    auto* sweep_seed_opt = add_override("seed", "master seed (decimal)");
    add_override("lr", "estimated tap length for od63");
    add_override("ne", "channel estimates per block (only 1 supported)");
    add_override("threads", "sweep worker threads (0 = auto)");
    bool sweep_stratified = false;
    sweep->add_flag("--stratified", sweep_stratified,
                    "exact per-class trial counts instead of uniform draws");

    // tables ---------------------------------------------------------------
    auto* tables = app.add_subcommand(
        "tables", "summarize report CSVs at 5/10/16 dB");
    std::vector<std::string> table_files;
    std::string table_csv;
    tables->add_option("reports", table_files, "report CSV files")
        ->required()
        ->expected(-1);
    tables->add_option("--csv", table_csv, "also write the summary as CSV");

    // inspect-db -----------------------------------------------------------
    auto* inspect = app.add_subcommand(
        "inspect-db", "print a database file's header and column means");
    std::string inspect_file;
    inspect->add_option("file", inspect_file, "WSDB file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) {
            std::uint64_t seed = 0;
            try {
                seed = std::stoull(build_seed);
            } catch (const std::exception&) {
                throw std::invalid_argument("seed: cannot parse '" +
                                            build_seed + "'");
            }
            return cmd_build_db(out_dir, build_scheme, build_tag, build_count,
                                build_snr, seed, build_force);
        }
        if (fit->parsed()) {
            return cmd_fit_pca(out_dir, fit_subset, fit_rho, fit_force);
        }
        if (sweep->parsed()) {
            harness::ExperimentConfig cfg =
                sweep_config.empty() ? config::defaults()
                                     : config::parse_file(sweep_config);
            for (const auto& [key, value] : sweep_overrides) {
                if (sweep->get_option("--" + key)->count() > 0) {
                    config::apply_key(cfg, key, value);
                }
            }
            if (sweep_seed_opt->count() == 0) {
                if (const char* env = std::getenv("CUMSIG_SEED")) {
                    config::apply_key(cfg, "seed", env);
                }
            }
            if (sweep_stratified) cfg.stratified = true;
            return cmd_sweep(out_dir, cfg);
        }
        if (tables->parsed()) {
            return cmd_tables(table_files, table_csv);
        }
        if (inspect->parsed()) {
            return cmd_inspect_db(inspect_file);
        }
    } catch (const PrereqError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPrereq;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
