#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glb/errors.hpp"
#include "glb/model.hpp"

namespace glb {

/// A configuration file after validation, with trace paths resolved against
/// the directory of the file.
struct ConfigFile {
    Config config;
    std::filesystem::path source;
    std::filesystem::path workload_trace;
    std::vector<std::filesystem::path> green_trace;
    std::vector<std::filesystem::path> price_trace;
    /// Multiplier applied to the workload trace.
    std::optional<double> scale;
};

namespace toml {

/// Reads the subset of TOML used by configuration files: `[table]`,
/// `[[array-of-tables]]`, `key = value` with strings, numbers, booleans and
/// flat arrays, and `#` comments. Dotted keys and inline tables are not
/// supported.
class Reader {
public:
    Reader(std::string text, std::string name) : text_(std::move(text)), name_(std::move(name)) {}

    nlohmann::json parse() {
        nlohmann::json root = nlohmann::json::object();
        nlohmann::json* current = &root;
        std::istringstream in(text_);
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_;
            line_text_ = raw;
            pos_ = 0;
            skip_ws();
            if (at_end() || peek() == '#') {
                continue;
            }
            if (peek() == '[') {
                current = &open_table(root);
            } else {
                const std::string key = read_key();
                skip_ws();
                expect('=');
                skip_ws();
                if (current->contains(key)) {
                    fail("duplicate key '" + key + "'");
                }
                (*current)[key] = read_value();
            }
            skip_ws();
            if (!at_end() && peek() != '#') {
                fail("unexpected trailing characters");
            }
        }
        return root;
    }

private:
    nlohmann::json& open_table(nlohmann::json& root) {
        ++pos_;
        const bool array = !at_end() && peek() == '[';
        if (array) {
            ++pos_;
        }
        skip_ws();
        const std::string name = read_key();
        skip_ws();
        expect(']');
        if (array) {
            expect(']');
            auto& arr = root[name];
            if (arr.is_null()) {
                arr = nlohmann::json::array();
            } else if (!arr.is_array()) {
                fail("'" + name + "' redefined as an array of tables");
            }
            arr.push_back(nlohmann::json::object());
            return arr.back();
        }
        auto& tbl = root[name];
        if (tbl.is_null()) {
            tbl = nlohmann::json::object();
        } else {
            fail("table '" + name + "' defined twice");
        }
        return tbl;
    }

    std::string read_key() {
        if (!at_end() && (peek() == '"' || peek() == '\'')) {
            return read_string();
        }
        std::string key;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                             peek() == '-')) {
            key += line_text_[pos_++];
        }
        if (key.empty()) {
            fail("expected a key");
        }
        return key;
    }

    nlohmann::json read_value() {
        if (at_end()) {
            fail("missing value");
        }
        const char c = peek();
        if (c == '"' || c == '\'') {
            return read_string();
        }
        if (c == '[') {
            ++pos_;
            nlohmann::json arr = nlohmann::json::array();
            skip_ws();
            while (!at_end() && peek() != ']') {
                arr.push_back(read_value());
                skip_ws();
                if (!at_end() && peek() == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            expect(']');
            return arr;
        }
        std::string token;
        while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' &&
               peek() != ']' && peek() != '#') {
            token += line_text_[pos_++];
        }
        if (token == "true") {
            return true;
        }
        if (token == "false") {
            return false;
        }
        std::string digits;
        for (char ch : token) {
            if (ch != '_') {
                digits += ch;
            }
        }
        const bool integral = digits.find_first_of(".eE") == std::string::npos &&
                              digits.find("inf") == std::string::npos &&
                              digits.find("nan") == std::string::npos;
        try {
            std::size_t used = 0;
            if (integral) {
                const long long v = std::stoll(digits, &used);
                if (used == digits.size()) {
                    return v;
                }
            } else {
                const double v = std::stod(digits, &used);
                if (used == digits.size()) {
                    return v;
                }
            }
        } catch (const std::exception&) {
        }
        fail("invalid value '" + token + "'");
    }

    std::string read_string() {
        const char quote = line_text_[pos_++];
        std::string out;
        while (!at_end() && peek() != quote) {
            char ch = line_text_[pos_++];
            if (quote == '"' && ch == '\\') {
                if (at_end()) {
                    break;
                }
                const char esc = line_text_[pos_++];
                switch (esc) {
                case 'n': ch = '\n'; break;
                case 't': ch = '\t'; break;
                case '"': ch = '"'; break;
                case '\\': ch = '\\'; break;
                default: fail(std::string("unsupported escape \\") + esc);
                }
            }
            out += ch;
        }
        expect(quote);
        return out;
    }

    [[nodiscard]] bool at_end() const { return pos_ >= line_text_.size(); }
    [[nodiscard]] char peek() const { return line_text_[pos_]; }

    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) {
            ++pos_;
        }
    }

    void expect(char c) {
        if (at_end() || peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(name_ + ":" + std::to_string(line_) + ": " + what);
    }

    std::string text_;
    std::string name_;
    std::string line_text_;
    std::size_t line_ = 0;
    std::size_t pos_ = 0;
};

} // namespace toml

namespace detail {

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + ": key '" + key + "' is not a number");
    }
    return v.get<double>();
}

inline std::string string_field(const nlohmann::json& obj, const char* key,
                                const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError(where + ": key '" + key + "' is not a string");
    }
    return v.get<std::string>();
}

} // namespace detail

/// Interprets a parsed configuration document. `base` is the directory trace
/// paths are relative to; `name` labels diagnostics.
[[nodiscard]] inline ConfigFile config_from_json(const nlohmann::json& doc,
                                                 const std::filesystem::path& base,
                                                 const std::string& name) {
    if (!doc.is_object()) {
        throw ConfigError(name + ": top level is not a table");
    }
    if (!doc.contains("sla") || !doc.at("sla").is_object()) {
        throw ConfigError(name + ": missing table 'sla'");
    }
    const auto& sla_doc = doc.at("sla");
    SlaSpec sla;
    sla.deadline = detail::number_field(sla_doc, "deadline_s", name + " [sla]");
    if (sla_doc.contains("slot_s")) {
        sla.slot_seconds = detail::number_field(sla_doc, "slot_s", name + " [sla]");
    }
    if (sla_doc.contains("queue_bound")) {
        sla.queue_bound = detail::number_field(sla_doc, "queue_bound", name + " [sla]");
    }

    if (!doc.contains("datacenter") || !doc.at("datacenter").is_array()) {
        throw ConfigError(name + ": missing array 'datacenter'");
    }
    ConfigFile out;
    std::vector<DataCenterSpec> specs;
    std::size_t index = 0;
    for (const auto& d : doc.at("datacenter")) {
        const std::string where = name + " [datacenter " + std::to_string(index++) + "]";
        DataCenterSpec dc;
        dc.id = detail::string_field(d, "id", where);
        dc.mu = detail::number_field(d, "mu", where);
        const double servers = detail::number_field(d, "max_servers", where);
        if (!(servers >= 0.0) || servers != std::floor(servers)) {
            throw ValidationError("max_servers", dc.id, "max_servers not a non-negative integer");
        }
        dc.max_servers = static_cast<std::size_t>(servers);
        dc.p_idle = detail::number_field(d, "p_idle_w", where);
        dc.p_peak = detail::number_field(d, "p_peak_w", where);
        dc.pue = detail::number_field(d, "pue", where);
        dc.d_net = detail::number_field(d, "d_net_s", where);
        if (d.contains("green_trace")) {
            out.green_trace.push_back(base / detail::string_field(d, "green_trace", where));
        }
        if (d.contains("price_trace")) {
            out.price_trace.push_back(base / detail::string_field(d, "price_trace", where));
        }
        specs.push_back(std::move(dc));
    }
    if (doc.contains("workload_trace")) {
        out.workload_trace = base / detail::string_field(doc, "workload_trace", name);
        if (!doc.contains("scale")) {
            throw ConfigError(name + ": 'scale' is required when 'workload_trace' is given");
        }
    }
    if (doc.contains("scale")) {
        out.scale = detail::number_field(doc, "scale", name);
        if (!(*out.scale >= 0.0) || !std::isfinite(*out.scale)) {
            throw ValidationError("scale", "", "scale negative or not finite");
        }
    }
    double carbon = default_carbon_intensity;
    if (doc.contains("carbon_intensity_g_per_wh")) {
        carbon = detail::number_field(doc, "carbon_intensity_g_per_wh", name);
    }
    out.config = validate_config(std::move(specs), sla, carbon);
    return out;
}

/// Loads a JSON (`.json`) or TOML (any other extension) configuration file.
[[nodiscard]] inline ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TraceError(TraceError::Kind::missing_file, path.string(), 0,
                         "cannot open configuration file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    if (path.extension() == ".json") {
        try {
            doc = nlohmann::json::parse(buf.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
    } else {
        doc = toml::Reader(buf.str(), path.string()).parse();
    }
    ConfigFile cfg = config_from_json(doc, path.parent_path(), path.string());
    cfg.source = path;
    return cfg;
}

} // namespace glb
