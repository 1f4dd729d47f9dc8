#pragma once

#include <stdexcept>
#include <string>

namespace cfotfs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration that cannot be realized (e.g. pilot overhead larger than the frame).
class InfeasibleConfiguration : public Error {
public:
    using Error::Error;
};

/// Input violates a documented precondition of the called operation.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// Second-order statistics that are not physically consistent (gamma > beta, ...).
class InvalidStatistics : public Error {
public:
    using Error::Error;
};

/// A delay-Doppler operator identity check exceeded its tolerance.
class IdentityViolation : public Error {
public:
    IdentityViolation(std::string identity, double deviation, double tolerance)
        : Error(identity + " violated: deviation " + std::to_string(deviation) +
                " exceeds tolerance " + std::to_string(tolerance)),
          identity_(std::move(identity)) {}

    const std::string& identity() const noexcept { return identity_; }

private:
    std::string identity_;
};

}  // namespace cfotfs
