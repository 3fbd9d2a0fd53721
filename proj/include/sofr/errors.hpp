#pragma once

#include <stdexcept>
#include <string>

namespace sofr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (t > T, beta outside [0,1], ...).
class DomainError : public Error {
   public:
    using Error::Error;
};

/// A fixing series does not cover its accrual period without gaps.
class CoverageError : public Error {
   public:
    using Error::Error;
};

/// Calendar weights are inconsistent with the period's calendar-day count.
class CalendarError : public Error {
   public:
    using Error::Error;
};

/// Valuation inside an accrual period without the realized history it depends on.
class MissingHistoryError : public Error {
   public:
    using Error::Error;
};

class UnsupportedRepresentationError : public Error {
   public:
    using Error::Error;
};

/// Quadrature or root-finding failed to reach the requested accuracy.
class NumericalError : public Error {
   public:
    using Error::Error;
};

/// Malformed scenario, model or fixing file.
class ConfigError : public Error {
   public:
    using Error::Error;
};

#define SOFR_REQUIRE(cond, ErrorType, msg)      \
    do {                                        \
        if (!(cond)) throw ErrorType(msg);      \
    } while (false)

}  // namespace sofr
