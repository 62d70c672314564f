#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace glb {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value violates one of the model invariants.
///
/// `field()` names the offending field (e.g. "pue"); `dc_id()` is the id of
/// the data center it belongs to, or empty for SLA / slot-level fields.
class ValidationError : public Error {
public:
    ValidationError(std::string field, std::string dc_id, const std::string& what)
        : Error(dc_id.empty() ? what : what + " (data center '" + dc_id + "')")
        , field_(std::move(field))
        , dc_id_(std::move(dc_id)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] const std::string& dc_id() const noexcept { return dc_id_; }

private:
    std::string field_;
    std::string dc_id_;
};

/// Load offered to a server pool exceeds what the pool can process.
class OverloadError : public Error {
public:
    using Error::Error;
};

/// A data center cannot admit any load under the SLA.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A metric whose denominator is zero.
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

/// A slot input rejected against the configuration; carries the slot index.
class SlotError : public Error {
public:
    SlotError(std::size_t slot, const std::string& what)
        : Error("slot " + std::to_string(slot) + ": " + what), slot_(slot) {}

    [[nodiscard]] std::size_t slot() const noexcept { return slot_; }

private:
    std::size_t slot_;
};

/// File-level failures while reading configuration or traces.
class TraceError : public Error {
public:
    enum class Kind { missing_file, ragged_length, negative_value, unparseable, missing_column };

    TraceError(Kind kind, std::string file, std::size_t line, const std::string& what)
        : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + what)
        , kind_(kind)
        , file_(std::move(file))
        , line_(line) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& file() const noexcept { return file_; }
    /// 1-based line number, 0 when the error is not tied to a line.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::string file_;
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class UnknownProfileError : public Error {
public:
    using Error::Error;
};

} // namespace glb
