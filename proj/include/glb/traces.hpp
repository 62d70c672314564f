#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "glb/config_file.hpp"
#include "glb/emit.hpp"
#include "glb/errors.hpp"
#include "glb/types.hpp"

/// Workload, green power and price traces.
///
/// File format: CSV with a mandatory header row. The workload file has the
/// columns `slot,workload` (requests/second); green power (W) and price
/// (currency/kWh) files have `slot,<dc-id>,<dc-id>,...`, one column per data
/// center. The slot column counts up from 0.
namespace glb {

struct TraceSet {
    std::vector<double> workload;
    /// Indexed [dc][slot].
    std::vector<std::vector<double>> green;
    /// Indexed [dc][slot].
    std::vector<std::vector<double>> price;
    std::size_t slots = 0;
    double scale = 1.0;

    bool operator==(const TraceSet&) const = default;

    /// Slot inputs with the workload scale applied.
    [[nodiscard]] std::vector<SlotInput> slot_inputs() const {
        std::vector<SlotInput> out(slots);
        for (std::size_t t = 0; t < slots; ++t) {
            out[t].slot = t;
            out[t].workload = workload[t] * scale;
            for (std::size_t i = 0; i < green.size(); ++i) {
                out[t].green_power.push_back(green[i][t]);
                out[t].price.push_back(price[i][t]);
            }
        }
        return out;
    }
};

namespace csv {

/// A numeric CSV table: header names and per-column values.
struct Table {
    std::string file;
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    std::size_t rows = 0;

    [[nodiscard]] const std::vector<double>& column(const std::string& name) const {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) {
                return columns[c];
            }
        }
        throw TraceError(TraceError::Kind::missing_column, file, 1,
                         "no column named '" + name + "'");
    }
};

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

/// Parses a decimal number; a leading U+2212 minus sign is read as '-'.
inline bool parse_number(std::string text, double& out) {
    static const std::string unicode_minus = "\xE2\x88\x92";
    if (text.rfind(unicode_minus, 0) == 0) {
        text = "-" + text.substr(unicode_minus.size());
    }
    if (text.empty()) {
        return false;
    }
    try {
        std::size_t used = 0;
        out = std::stod(text, &used);
        return used == text.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

[[nodiscard]] inline Table read(const std::filesystem::path& path) {
    Table t;
    t.file = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TraceError(TraceError::Kind::missing_file, t.file, 0, "cannot open trace file");
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto cells = split(line);
        if (t.header.empty()) {
            if (cells.empty() || cells[0] != "slot") {
                throw TraceError(TraceError::Kind::unparseable, t.file, lineno,
                                 "header must start with 'slot'");
            }
            t.header = std::move(cells);
            t.columns.resize(t.header.size());
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw TraceError(TraceError::Kind::unparseable, t.file, lineno,
                             "expected " + std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            if (!parse_number(cells[c], v)) {
                throw TraceError(TraceError::Kind::unparseable, t.file, lineno,
                                 "cannot parse '" + cells[c] + "' in column '" + t.header[c] + "'");
            }
            if (v < 0.0) {
                throw TraceError(TraceError::Kind::negative_value, t.file, lineno,
                                 "negative value '" + cells[c] + "' in column '" + t.header[c] + "'");
            }
            if (c == 0 && v != static_cast<double>(t.rows)) {
                throw TraceError(TraceError::Kind::unparseable, t.file, lineno,
                                 "slot index " + cells[c] + " out of sequence, expected " +
                                     std::to_string(t.rows));
            }
            t.columns[c].push_back(v);
        }
        ++t.rows;
    }
    if (t.header.empty()) {
        throw TraceError(TraceError::Kind::unparseable, t.file, 0, "empty trace file");
    }
    return t;
}

} // namespace csv

/// Reads and aligns the traces named by a configuration file.
[[nodiscard]] inline TraceSet load_traces(const ConfigFile& cf) {
    const Config& cfg = cf.config;
    if (cf.workload_trace.empty()) {
        throw ConfigError("configuration names no workload_trace");
    }
    if (cf.green_trace.size() != cfg.size() || cf.price_trace.size() != cfg.size()) {
        throw ConfigError("every datacenter needs green_trace and price_trace");
    }

    std::map<std::filesystem::path, csv::Table> cache;
    auto table = [&](const std::filesystem::path& p) -> const csv::Table& {
        auto it = cache.find(p);
        if (it == cache.end()) {
            it = cache.emplace(p, csv::read(p)).first;
        }
        return it->second;
    };

    const csv::Table& wl = table(cf.workload_trace);
    TraceSet ts;
    ts.workload = wl.column("workload");
    ts.slots = wl.rows;
    ts.scale = cf.scale.value_or(1.0);

    auto aligned = [&](const csv::Table& t) {
        if (t.rows != wl.rows) {
            throw TraceError(TraceError::Kind::ragged_length, t.file, 0,
                             "has " + std::to_string(t.rows) + " rows but " + wl.file + " has " +
                                 std::to_string(wl.rows));
        }
    };
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const std::string& id = cfg.datacenter(i).id;
        const csv::Table& g = table(cf.green_trace[i]);
        aligned(g);
        ts.green.push_back(g.column(id));
        const csv::Table& p = table(cf.price_trace[i]);
        aligned(p);
        ts.price.push_back(p.column(id));
    }
    return ts;
}

/// Names of the synthetic trace shapes.
struct TraceProfile {
    /// "diurnal" (one daily peak) or "flat".
    std::string workload = "diurnal";
    /// "wind" (bounded random walk) or "none".
    std::string green = "wind";
    /// "market" (mean-reverting) or "flat".
    std::string price = "market";

    /// Peak workload of the diurnal profile and level of the flat one, req/s.
    double workload_peak = 120000.0;
    /// Trough-to-peak ratio of the diurnal profile.
    double workload_trough = 0.35;
    /// Upper clip of the wind random walk, W.
    double green_max = 2.4e6;
    /// Long-run mean price, currency/kWh.
    double price_mean = 0.05;
};

/// Deterministic synthetic traces: the same seed and arguments always yield
/// the same TraceSet.
[[nodiscard]] inline TraceSet gen_traces(std::uint64_t seed, std::size_t slots, std::size_t dcs,
                                         const TraceProfile& profile = {}) {
    if (slots == 0 || dcs == 0) {
        throw ValidationError("slots", "", "gen_traces needs at least one slot and one data center");
    }
    auto known = [](const std::string& v, std::initializer_list<const char*> names) {
        return std::any_of(names.begin(), names.end(), [&](const char* n) { return v == n; });
    };
    if (!known(profile.workload, {"diurnal", "flat"})) {
        throw UnknownProfileError("unknown workload profile '" + profile.workload + "'");
    }
    if (!known(profile.green, {"wind", "none"})) {
        throw UnknownProfileError("unknown green profile '" + profile.green + "'");
    }
    if (!known(profile.price, {"market", "flat"})) {
        throw UnknownProfileError("unknown price profile '" + profile.price + "'");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TraceSet ts;
    ts.slots = slots;

    ts.workload.resize(slots);
    if (profile.workload == "diurnal") {
        const double peak_hour = std::floor(unit(rng) * 24.0);
        const double trough = profile.workload_peak * profile.workload_trough;
        for (std::size_t t = 0; t < slots; ++t) {
            const double phase = 2.0 * std::numbers::pi * (static_cast<double>(t % 24) - peak_hour) / 24.0;
            const double shape = 0.5 * (1.0 + std::cos(phase));
            const double noise = 1.0 + 0.02 * (unit(rng) - 0.5);
            ts.workload[t] = (trough + (profile.workload_peak - trough) * shape) * noise;
        }
    } else {
        std::fill(ts.workload.begin(), ts.workload.end(), profile.workload_peak);
    }

    ts.green.assign(dcs, std::vector<double>(slots, 0.0));
    if (profile.green == "wind") {
        for (std::size_t i = 0; i < dcs; ++i) {
            double level = unit(rng) * profile.green_max;
            for (std::size_t t = 0; t < slots; ++t) {
                level += (unit(rng) - 0.5) * 0.5 * profile.green_max;
                level = std::clamp(level, 0.0, profile.green_max);
                ts.green[i][t] = level;
            }
        }
    }

    ts.price.assign(dcs, std::vector<double>(slots, profile.price_mean));
    if (profile.price == "market") {
        const double floor = 0.1 * profile.price_mean;
        for (std::size_t i = 0; i < dcs; ++i) {
            const double mean = profile.price_mean * (0.7 + 0.6 * unit(rng));
            double p = mean;
            for (std::size_t t = 0; t < slots; ++t) {
                p += 0.3 * (mean - p) + 0.2 * mean * (unit(rng) - 0.5);
                p = std::max(floor, p);
                ts.price[i][t] = p;
            }
        }
    }
    return ts;
}

/// Writes `workload.csv`, `green.csv` and `price.csv` into `dir`. Values are
/// written with round-trip precision.
inline void write_traces(const TraceSet& ts, const std::vector<std::string>& ids,
                         const std::filesystem::path& dir) {
    if (ids.size() != ts.green.size()) {
        throw ValidationError("ids", "", "one id per data center required");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
    auto exact = [](double v) { return format_number(v, 17); };

    std::ostringstream wl;
    wl << "slot,workload\n";
    for (std::size_t t = 0; t < ts.slots; ++t) {
        wl << t << ',' << exact(ts.workload[t]) << '\n';
    }
    auto per_dc = [&](const std::vector<std::vector<double>>& series) {
        std::ostringstream out;
        out << "slot";
        for (const auto& id : ids) {
            out << ',' << id;
        }
        out << '\n';
        for (std::size_t t = 0; t < ts.slots; ++t) {
            out << t;
            for (const auto& s : series) {
                out << ',' << exact(s[t]);
            }
            out << '\n';
        }
        return out.str();
    };
    write_file_atomic(dir / "workload.csv", wl.str());
    write_file_atomic(dir / "green.csv", per_dc(ts.green));
    write_file_atomic(dir / "price.csv", per_dc(ts.price));
}

} // namespace glb
