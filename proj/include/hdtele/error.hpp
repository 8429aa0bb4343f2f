#pragma once

#include <stdexcept>
#include <string>

namespace hdtele {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad indices, dimension mismatches, out-of-domain parameters.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Grid too coarse for a mode or kernel, or two spectra on different grids.
class GridError : public Error {
public:
    using Error::Error;
};

// Iterative or adaptive numerics missed their tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, long iterations = 0, double residual = 0.0)
        : Error(what), iterations_(iterations), residual_(residual) {}
    long iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    long iterations_;
    double residual_;
};

// Malformed text input: mode strings, config files, ranges.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace hdtele
