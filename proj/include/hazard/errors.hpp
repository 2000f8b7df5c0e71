#pragma once

#include <stdexcept>
#include <string>

namespace hazard {

// Input failed schema/invariant validation (generator rows, config keys, ...).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine could not reach its requested tolerance.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double achieved_tolerance)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tolerance) + ")"),
          achieved(achieved_tolerance) {}
    double achieved;
};

// The survival kernel dropped below its floor on part of a window.
class singular_kernel_error : public std::runtime_error {
public:
    singular_kernel_error(const std::string& what, double lo, double hi)
        : std::runtime_error(what + " on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          interval_lo(lo), interval_hi(hi) {}
    double interval_lo;
    double interval_hi;
};

} // namespace hazard
