/// @file errors.hpp
/// @brief Error kinds raised by the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roughns {

enum class ErrorKind {
    invalid_input,
    invalid_interval,
    incompatible_paths,
    invalid_parameter,
    invalid_shift,
    incompatible_driver,
    blow_up,
    invalid_data,
    invalid_probe,
    incompatible,
    invalid_continuation,
    horizon_exceeded,
    invalid_config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when a solve produces non-finite coefficients or exceeds the
/// growth threshold. step() is the index of the failing output step.
class BlowUp : public Error {
public:
    BlowUp(std::size_t step, const std::string& what);
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Configuration schema violation; line() is 0 when the field is missing altogether.
class ConfigError : public Error {
public:
    ConfigError(std::string field, std::size_t line, const std::string& what);
    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

}  // namespace roughns
