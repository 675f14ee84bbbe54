#pragma once

#include <stdexcept>
#include <string>

namespace ebt {

// Base class for all library errors. Everything raised by the library
// derives from this, so callers can catch one type at the boundary.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A coefficient was requested outside the interval on which an operator's
// coefficients are actually known.
struct WindowMiss : Error {
    explicit WindowMiss(const std::string& what) : Error("window miss: " + what) {}
};

// An arithmetic result left the declared epsilon-window or exceeded the
// x-degree cap; the truncation model cannot represent it.
struct WindowOverflow : Error {
    explicit WindowOverflow(const std::string& what) : Error("window overflow: " + what) {}
};

// An operation required a unit (invertible) leading/constant coefficient and
// did not get one.
struct NonUnitLeading : Error {
    explicit NonUnitLeading(const std::string& what) : Error("non-unit leading coefficient: " + what) {}
};

// pochhammer(q, n) with n < 0 hit a zero factor, i.e. the extension
// (q)_{-n} = 1/((q+1)...(q+n)) has a pole at this argument.
struct PolePochhammer : Error {
    explicit PolePochhammer(const std::string& what) : Error("pochhammer pole: " + what) {}
};

// The requested computation needs more active times / higher truncation
// order than the configuration provides.
struct TruncationInsufficient : Error {
    explicit TruncationInsufficient(const std::string& what) : Error("truncation insufficient: " + what) {}
};

// A mode flag combination is not supported (e.g. full wave-operator mode
// with higher-order logarithmic times).
struct UnsupportedMode : Error {
    explicit UnsupportedMode(const std::string& what) : Error("unsupported mode: " + what) {}
};

// Tau reconstruction found an integrability obstruction in its input.
struct IncompatibleData : Error {
    explicit IncompatibleData(const std::string& what) : Error("incompatible data: " + what) {}
};

// An operator violated a declared band constraint.
struct BandViolation : Error {
    explicit BandViolation(const std::string& what) : Error("band violation: " + what) {}
};

// Bad run configuration (CLI / verify layer).
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

} // namespace ebt
