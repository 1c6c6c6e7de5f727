// errors.hpp
// Exception types shared across the library.

#ifndef POREHOM_ERRORS_HPP
#define POREHOM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace porehom {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad or degenerate cell geometry (disconnected fluid, all-solid mask, ...).
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

/// Config file syntax, unknown key, or out-of-range value. Carries the line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

/// A stage was invoked without the files a previous stage should have written.
class DependencyError : public Error {
public:
    DependencyError(const std::string& stage, const std::string& missing_file)
        : Error(stage + ": missing required input file '" + missing_file + "'"),
          file_(missing_file) {}
    const std::string& missing_file() const { return file_; }

private:
    std::string file_;
};

/// NaN/Inf or out-of-bounds order parameter during time integration.
class BlowupError : public Error {
public:
    BlowupError(const std::string& msg, double time)
        : Error(msg + " at t=" + std::to_string(time)), time_(time) {}
    double time() const { return time_; }

private:
    double time_ = 0.0;
};

/// Step size hit dt_min with the local error still above tolerance.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& msg, double time, double dt)
        : Error(msg + " at t=" + std::to_string(time) + ", dt=" + std::to_string(dt)),
          time_(time), dt_(dt) {}
    double time() const { return time_; }
    double dt() const { return dt_; }

private:
    double time_ = 0.0;
    double dt_ = 0.0;
};

} // namespace porehom

#endif
