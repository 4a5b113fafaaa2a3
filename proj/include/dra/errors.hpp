#pragma once

#include <stdexcept>
#include <string>

namespace dra {

// Base class for every error raised by the library. Each condition gets its
// own type so callers can react to (or test for) a specific failure without
// string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- group / embedding validation ---------------------------------------

struct GroupTooSmall : Error {
    using Error::Error;
};

struct ZeroNormEmbedding : Error {
    using Error::Error;
};

struct NonFiniteValue : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// -- similarity / SMI ----------------------------------------------------

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

// -- reward adjustment ---------------------------------------------------

struct NonPositiveDenominator : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

// -- objective / policy --------------------------------------------------

struct NonPositiveRatio : Error {
    using Error::Error;
};

struct StaleSnapshot : Error {
    using Error::Error;
};

// -- simulator -----------------------------------------------------------

struct BadTrajectory : Error {
    using Error::Error;
};

struct GeometryNotExact : Error {
    using Error::Error;
};

// -- rewards -------------------------------------------------------------

struct LengthOutOfRange : Error {
    using Error::Error;
};

struct UnknownComponent : Error {
    using Error::Error;
};

// -- analyzer / io / cli -------------------------------------------------

struct EmptyDataset : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct MixedDimension : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace dra
