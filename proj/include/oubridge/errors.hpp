#pragma once

#include <stdexcept>
#include <string>

namespace oubridge {

enum class ErrorKind {
    Domain,
    UnsupportedBoundaryPin,
    NotApplicable,
    NotStronglyRegular,
    NumericalBlowup,
    UnsupportedOrder,
    SeriesInvalidHere,
    Config,
    InsufficientExits,
};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define OUBRIDGE_ERROR(Name, Kind)                                   \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what) : Error(Kind, what) {} \
    };

OUBRIDGE_ERROR(DomainError, ErrorKind::Domain)
OUBRIDGE_ERROR(UnsupportedBoundaryPin, ErrorKind::UnsupportedBoundaryPin)
OUBRIDGE_ERROR(NotApplicable, ErrorKind::NotApplicable)
OUBRIDGE_ERROR(NotStronglyRegular, ErrorKind::NotStronglyRegular)
OUBRIDGE_ERROR(NumericalBlowup, ErrorKind::NumericalBlowup)
OUBRIDGE_ERROR(UnsupportedOrder, ErrorKind::UnsupportedOrder)
OUBRIDGE_ERROR(SeriesInvalidHere, ErrorKind::SeriesInvalidHere)
OUBRIDGE_ERROR(ConfigError, ErrorKind::Config)
OUBRIDGE_ERROR(InsufficientExits, ErrorKind::InsufficientExits)

#undef OUBRIDGE_ERROR

}  // namespace oubridge
