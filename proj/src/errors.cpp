#include "roughns/errors.hpp"

#include <utility>

namespace roughns {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::invalid_interval: return "invalid-interval";
        case ErrorKind::incompatible_paths: return "incompatible-paths";
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::invalid_shift: return "invalid-shift";
        case ErrorKind::incompatible_driver: return "incompatible-driver";
        case ErrorKind::blow_up: return "blow-up";
        case ErrorKind::invalid_data: return "invalid-data";
        case ErrorKind::invalid_probe: return "invalid-probe";
        case ErrorKind::incompatible: return "incompatible";
        case ErrorKind::invalid_continuation: return "invalid-continuation";
        case ErrorKind::horizon_exceeded: return "horizon-exceeded";
        case ErrorKind::invalid_config: return "invalid-config";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

BlowUp::BlowUp(std::size_t step, const std::string& what)
    : Error(ErrorKind::blow_up, what + " (step " + std::to_string(step) + ")"), step_(step) {}

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& what)
    : Error(ErrorKind::invalid_config,
            (line > 0 ? "line " + std::to_string(line) + ", " : std::string()) + "field '" + field + "': " + what),
      field_(std::move(field)),
      line_(line) {}

}  // namespace roughns
