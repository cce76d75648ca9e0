#pragma once

#include <stdexcept>
#include <string>

namespace sisstab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct OffCircle : Error {
    using Error::Error;
};

struct ZeroDivisor : Error {
    using Error::Error;
};

/// No exact polynomial quotient exists.
struct NotDivisible : Error {
    using Error::Error;
};

struct SizeLimitExceeded : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

/// Delta(z) - A_SS is (numerically) singular somewhere it had to be inverted.
struct WellPosednessError : Error {
    using Error::Error;
};

struct UnsupportedError : Error {
    using Error::Error;
};

/// A Gram block of the domain SOS program would get a negative degree.
struct InfeasibleDegreeLedger : Error {
    using Error::Error;
};

/// A leading Routh entry vanished identically before the table was complete.
struct DegenerateTable : Error {
    DegenerateTable(const std::string& what, int row_) : Error(what), row(row_) {}
    int row;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace sisstab
