#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

// Quadrature or eigensolver gave up before reaching its tolerance.
class numerical_failure : public std::runtime_error {
public:
    numerical_failure(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

// Box product would need more pieces than allowed.
class budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Haar depth deeper than the sampling grid.
class resolution_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input function not contained in the covered window.
class window_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

}  // namespace hardy
