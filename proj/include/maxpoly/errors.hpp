#pragma once

#include <stdexcept>
#include <string>

namespace maxpoly {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (odd n, x > 1, ...).
struct DomainError : Error {
    using Error::Error;
};

struct InvalidPolygon : Error {
    using Error::Error;
};

// A vertex pair is farther apart than 1 + tol.
struct NotSmallPolygon : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Schema or syntax violation; `path` is a JSON pointer to the offending field.
struct ParseError : Error {
    ParseError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct InfeasibleError : Error {
    InfeasibleError(const std::string& what, double best_violation)
        : Error(what), best_violation_(best_violation) {}
    double best_violation() const noexcept { return best_violation_; }

private:
    double best_violation_;
};

} // namespace maxpoly
