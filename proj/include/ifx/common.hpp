#pragma once

#include <stdexcept>
#include <string>

namespace ifx {

// Raised when an inversion target lies outside the closed range of the map,
// e.g. inverting y with |y| >= 1 while the regularization weight is zero.
struct DomainExceeded : std::runtime_error {
    explicit DomainExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an iterative procedure exhausts its iteration budget.
struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an explicit step is requested beyond its stability limit.
struct StabilityViolation : std::runtime_error {
    explicit StabilityViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised for malformed configuration files, flags, or incompatible settings.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ifx
