#pragma once

// Flat key = value experiment configuration: parsing, canonical snapshots,
// and provenance digests.  Keys: channel, omega, methods, trials, snr, rho,
// seed, lr, ne, stratified, threads.  '#' starts a comment; blank lines are
// ignored; later assignments override earlier ones.  A snapshot is itself a
// valid config file and re-parses to the identical configuration.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cumsig/harness.hpp"

namespace cumsig::config {

// All defaults resolved (including the -5..16 dB grid).
harness::ExperimentConfig defaults();

// "a:b:c" = inclusive range from a to b in steps of c, or a comma-separated
// value list. Throws std::invalid_argument on malformed text, empty grids,
// or a non-positive step.
std::vector<double> parse_snr_grid(const std::string& text);

// Comma-separated method names, or "all" for every method.
std::vector<harness::Method> parse_methods(const std::string& text);
std::string methods_string(const std::vector<harness::Method>& methods);

// Applies one assignment. Throws std::invalid_argument for unknown keys or
// unparseable values, with the key named in the message.
void apply_key(harness::ExperimentConfig& config, const std::string& key,
               const std::string& value);

// Parse config text / file on top of defaults().
harness::ExperimentConfig parse_string(const std::string& text);
harness::ExperimentConfig parse_file(const std::filesystem::path& path);

// Canonical re-parseable serialization of every key.
std::string snapshot(const harness::ExperimentConfig& config);

// FNV-1a 64-bit digest of the canonical snapshot, as 16 hex digits; this is
// the provenance hash recorded in reports and manifests.
std::uint64_t fnv1a64(std::string_view text);
std::string digest_hex(const harness::ExperimentConfig& config);

}  // namespace cumsig::config
