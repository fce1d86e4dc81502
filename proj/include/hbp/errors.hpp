#ifndef HBP_ERRORS_HPP
#define HBP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hbp {

// Base class for all library errors. Subclasses map to CLI exit codes:
// validation -> 2, infeasible -> 3, io -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data or configuration (malformed records, domain violations).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A requested configuration cannot run (out of memory, no feasible strategy).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Filesystem / stream failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hbp

#endif // HBP_ERRORS_HPP
