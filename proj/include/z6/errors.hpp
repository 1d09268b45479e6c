#pragma once

#include <stdexcept>
#include <string>

namespace z6 {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters outside the regime an operation is defined for (p2 = 0, |s2| <= 1).
class RegimeError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Cherkas map evaluated on (or next to) its singular set.
class SingularTransform : public Error {
public:
    using Error::Error;
};

/// Analytic and sampled verdicts disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Base for failures of the numerical machinery (integration, root finding).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A theta-parameterized trajectory reached the curve where d(theta)/dt = 0.
class SectionBreakdown : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BlowUp : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotFound : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// No-contact polygonal could not be certified.
class ConstructionFailure : public Error {
public:
    using Error::Error;
};

}  // namespace z6
