#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "glb/allocator.hpp"
#include "glb/errors.hpp"
#include "glb/types.hpp"

/// Result files.
///
/// simulate CSV columns:
///   slot,total_power_w,brown_power_w,green_utilization,brown_cost,unserved,
///   then lg_<id>,lb_<id> (green and brown request rates) per data center.
/// tradeoff CSV columns:
///   target_g,achieved_g,total_power_w,brown_power_w,feasible
/// JSON output is an array with one object per row using the same keys.
/// Numbers carry 6 significant digits.
namespace glb {

enum class OutputFormat { csv, json };

[[nodiscard]] inline std::string format_number(double v, int digits = 6) {
    if (v == 0.0) {
        v = 0.0;  // no "-0"
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// Writes `content` to `path` through a sibling temporary file, so a failed
/// write never leaves a partial file behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out << content;
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("error writing " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot write " + path.string());
    }
}

namespace detail {

struct Row {
    std::vector<std::pair<std::string, std::string>> cells;  // key, rendered value
};

inline std::string render_csv(const std::vector<std::string>& header, const std::vector<Row>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        out += (c ? "," : "") + header[c];
    }
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.cells.size(); ++c) {
            out += (c ? "," : "") + r.cells[c].second;
        }
        out += '\n';
    }
    return out;
}

inline std::string render_json(const std::vector<Row>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (const auto& [key, text] : r.cells) {
            // Rendered cells are JSON literals (integers, reals, booleans);
            // anything else is kept as a string.
            auto value = nlohmann::ordered_json::parse(text, nullptr, false);
            obj[key] = value.is_discarded() ? nlohmann::ordered_json(text) : std::move(value);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

inline std::string render(OutputFormat fmt, const std::vector<std::string>& header,
                          const std::vector<Row>& rows) {
    return fmt == OutputFormat::csv ? render_csv(header, rows) : render_json(rows);
}

} // namespace detail

[[nodiscard]] inline std::vector<std::string> slot_result_header(std::span<const std::string> ids) {
    std::vector<std::string> h{"slot",       "total_power_w", "brown_power_w",
                               "green_utilization", "brown_cost", "unserved"};
    for (const auto& id : ids) {
        h.push_back("lg_" + id);
        h.push_back("lb_" + id);
    }
    return h;
}

[[nodiscard]] inline std::string render_slot_results(std::span<const SlotResult> results,
                                                     std::span<const std::string> ids,
                                                     OutputFormat fmt) {
    const auto header = slot_result_header(ids);
    std::vector<detail::Row> rows;
    for (const auto& r : results) {
        detail::Row row;
        std::size_t c = 0;
        auto add = [&](std::string text) { row.cells.emplace_back(header[c++], std::move(text)); };
        add(std::to_string(r.slot));
        add(format_number(r.total_power));
        add(format_number(r.brown_power));
        add(format_number(r.green_utilization));
        add(format_number(r.brown_cost));
        add(format_number(r.unserved));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            add(format_number(r.allocation.green_rate.at(i)));
            add(format_number(r.allocation.brown_rate.at(i)));
        }
        rows.push_back(std::move(row));
    }
    return detail::render(fmt, header, rows);
}

[[nodiscard]] inline std::string render_tradeoff(std::span<const TradeoffPoint> points,
                                                 OutputFormat fmt) {
    const std::vector<std::string> header{"target_g", "achieved_g", "total_power_w",
                                          "brown_power_w", "feasible"};
    std::vector<detail::Row> rows;
    for (const auto& p : points) {
        detail::Row row;
        row.cells = {{header[0], format_number(p.target_utilization)},
                     {header[1], format_number(p.achieved_utilization)},
                     {header[2], format_number(p.total_power)},
                     {header[3], format_number(p.brown_power)},
                     {header[4], p.feasible ? "true" : "false"}};
        rows.push_back(std::move(row));
    }
    return detail::render(fmt, header, rows);
}

inline void emit_results(std::span<const SlotResult> results, std::span<const std::string> ids,
                         OutputFormat fmt, const std::filesystem::path& dest) {
    write_file_atomic(dest, render_slot_results(results, ids, fmt));
}

inline void emit_results(std::span<const TradeoffPoint> points, OutputFormat fmt,
                         const std::filesystem::path& dest) {
    write_file_atomic(dest, render_tradeoff(points, fmt));
}

} // namespace glb
