#pragma once

#include <stdexcept>
#include <string>

namespace qlorder {

/// Bad argument shape or value (length mismatch, out-of-range order, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation hit a degenerate configuration, e.g. a component whose
/// reference waveform has zero energy.
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Config or data file problem. Carries the file path and 1-based line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, std::size_t line, const std::string& what)
        : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          path_(std::move(path)), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

} // namespace qlorder
