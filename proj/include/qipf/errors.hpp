#pragma once

#include <stdexcept>
#include <string>

namespace qipf {

/// Configuration rejected; `field` names the offending entry (dotted path).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}

    std::string field;
};

/// Numerical failure inside a computation. sample_index is 1-based
/// (or the integrator step for generators); mode 0 means the
/// fundamental wave-function rather than a Hermite mode.
class NumericError : public std::runtime_error {
public:
    NumericError(long sample_index_, int mode_, const std::string& what)
        : std::runtime_error("sample " + std::to_string(sample_index_) + ", mode " +
                             std::to_string(mode_) + ": " + what),
          sample_index(sample_index_),
          mode(mode_) {}

    long sample_index;
    int mode;
};

}  // namespace qipf
