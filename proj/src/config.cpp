#include "cumsig/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cumsig::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": cannot parse number '" + value +
                                    "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": cannot parse integer '" + value +
                                    "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size() || value.front() == '-') {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": cannot parse unsigned integer '" +
                                    value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument(key + ": expected true|false, got '" + value +
                                "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

harness::ExperimentConfig defaults() {
    harness::ExperimentConfig config;
    config.snr_grid_db = harness::default_snr_grid();
    return config;
}

std::vector<double> parse_snr_grid(const std::string& text) {
    const std::string body = trim(text);
    if (body.empty()) throw std::invalid_argument("snr: empty grid");
    std::vector<double> grid;
    if (body.find(':') != std::string::npos) {
        const auto parts = split(body, ':');
        if (parts.size() != 3) {
            throw std::invalid_argument(
                "snr: range form is start:stop:step, got '" + body + "'");
        }
        const double start = parse_double("snr", parts[0]);
        const double stop = parse_double("snr", parts[1]);
        const double step = parse_double("snr", parts[2]);
        if (!(step > 0.0)) {
            throw std::invalid_argument("snr: step must be positive");
        }
        if (stop < start) {
            throw std::invalid_argument("snr: stop is below start");
        }
        const int count =
            static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
        grid.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            grid.push_back(start + step * static_cast<double>(i));
        }
    } else {
        for (const auto& part : split(body, ',')) {
            if (part.empty()) {
                throw std::invalid_argument("snr: empty entry in list");
            }
            grid.push_back(parse_double("snr", part));
        }
    }
    return grid;
}

std::vector<harness::Method> parse_methods(const std::string& text) {
    const std::string body = trim(text);
    std::vector<harness::Method> methods;
    if (body == "all") {
        for (int i = 0; i < harness::kMethodCount; ++i) {
            methods.push_back(static_cast<harness::Method>(i));
        }
        return methods;
    }
    for (const auto& part : split(body, ',')) {
        const auto method = harness::method_from_label(part);
        if (!method) {
            throw std::invalid_argument(
                "methods: unknown method '" + part +
                "' (expected ws_full|ws_reduced_14|ws_reduced_omega|od63)");
        }
        for (const auto seen : methods) {
            if (seen == *method) {
                throw std::invalid_argument("methods: duplicate '" + part +
                                            "'");
            }
        }
        methods.push_back(*method);
    }
    if (methods.empty()) {
        throw std::invalid_argument("methods: empty list");
    }
    return methods;
}

std::string methods_string(const std::vector<harness::Method>& methods) {
    std::string out;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (i) out += ',';
        out += harness::method_label(methods[i]);
    }
    return out;
}

void apply_key(harness::ExperimentConfig& config, const std::string& key,
               const std::string& value) {
    if (key == "channel") {
        config.channel_tag = value;
    } else if (key == "omega") {
        config.omega = value;
    } else if (key == "methods") {
        config.methods = parse_methods(value);
    } else if (key == "trials") {
        config.trials = static_cast<int>(parse_int(key, value));
    } else if (key == "snr") {
        config.snr_grid_db = parse_snr_grid(value);
    } else if (key == "rho") {
        config.rho = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
        config.master_seed = parse_u64(key, value);
    } else if (key == "lr") {
        config.tap_count = static_cast<int>(parse_int(key, value));
    } else if (key == "ne") {
        config.n_estimates = static_cast<int>(parse_int(key, value));
    } else if (key == "stratified") {
        config.stratified = parse_bool(key, value);
    } else if (key == "threads") {
        config.threads = static_cast<int>(parse_int(key, value));
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

harness::ExperimentConfig parse_string(const std::string& text) {
    harness::ExperimentConfig config = defaults();
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " +
                                        std::to_string(line_no) +
                                        ": expected key = value");
        }
        apply_key(config, trim(line.substr(0, eq)),
                  trim(line.substr(eq + 1)));
    }
    return config;
}

harness::ExperimentConfig parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot read config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_string(buffer.str());
}

std::string snapshot(const harness::ExperimentConfig& config) {
    std::ostringstream os;
    os << "# experiment configuration (key = value; '#' starts a comment)\n";
    os << "channel = " << config.channel_tag << '\n';
    os << "omega = " << config.omega << '\n';
    os << "methods = " << methods_string(config.methods) << '\n';
    os << "trials = " << config.trials << '\n';
    os << "snr = ";
    for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
        if (i) os << ',';
        os << format_double(config.snr_grid_db[i]);
    }
    os << '\n';
    os << "rho = " << config.rho << '\n';
    os << "seed = " << config.master_seed << '\n';
    os << "lr = " << config.tap_count << '\n';
    os << "ne = " << config.n_estimates << '\n';
    os << "stratified = " << (config.stratified ? "true" : "false") << '\n';
    os << "threads = " << config.threads << '\n';
    return os.str();
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string digest_hex(const harness::ExperimentConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(snapshot(config))));
    return buf;
}

}  // namespace cumsig::config
