#pragma once

#include <stdexcept>
#include <string>

namespace spikesolve {

/// Invalid argument or violated precondition (bad M, odd degree, infeasible packing, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure could not produce a trustworthy answer
/// (singular system, failed bracketing, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double condition_estimate = 0.0)
        : std::runtime_error(what), condition_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

/// File or parse failure on external input.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spikesolve
