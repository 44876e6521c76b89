#ifndef PROLATE_ERRORS_HPP
#define PROLATE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace prolate {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid arguments or malformed input data.
class validation_error : public error {
public:
    explicit validation_error(const std::string& msg) : error(msg) {}
};

/// A basis, grid, or guess space is too small for the requested operation,
/// or an expansion failed to converge at the requested size.
class dimension_error : public error {
public:
    explicit dimension_error(const std::string& msg) : error(msg) {}
};

/// An internal numerical consistency check failed (ordering, hermiticity,
/// positive semidefiniteness, residual thresholds).
class consistency_error : public error {
public:
    explicit consistency_error(const std::string& msg) : error(msg) {}
};

} // namespace prolate

#endif
