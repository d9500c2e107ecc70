#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavelab {

using cplx = std::complex<double>;

/// Baseband complex samples / symbols.
using ComplexVec = std::vector<cplx>;

/// Real-valued sample vector. When it carries a packed complex vector of
/// length K, size() == 2K with real parts first, imaginary parts last.
using RealVec = std::vector<double>;

/// Ordered bit sequence, one bit per element (0 or 1).
using BitStream = std::vector<std::uint8_t>;

constexpr double kPi = 3.14159265358979323846;

/// Thrown when an input violates an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown for unsupported or inconsistent configuration values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Timing synchronization did not find a credible correlation peak.
class SyncFailure : public std::runtime_error {
public:
    SyncFailure(const std::string& what, double metric)
        : std::runtime_error(what), peak_metric(metric) {}
    double peak_metric;
};

/// Payload does not fit into the configured frame.
class FrameCapacityError : public std::runtime_error {
public:
    FrameCapacityError(const std::string& what, std::size_t required_, std::size_t available_)
        : std::runtime_error(what), required(required_), available(available_) {}
    std::size_t required;
    std::size_t available;
};

/// Training diverged or failed to converge; carries the loss history.
class TrainingFailure : public std::runtime_error {
public:
    TrainingFailure(const std::string& what, std::vector<double> curve)
        : std::runtime_error(what), loss_curve(std::move(curve)) {}
    std::vector<double> loss_curve;
};

/// Pilot correlation matrix is numerically rank-deficient.
class IllConditionedPilot : public std::runtime_error {
public:
    IllConditionedPilot(const std::string& what, double cond)
        : std::runtime_error(what), condition_number(cond) {}
    double condition_number;
};

}  // namespace wavelab
