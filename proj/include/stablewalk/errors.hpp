#pragma once

#include <stdexcept>
#include <string>

namespace stablewalk {

// Bad arguments or inputs outside a routine's mathematical domain.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation was attempted but could not deliver the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class PoleError : public InputError {
public:
    using InputError::InputError;
};

// The regularity set of the input is not covered by the requested operation.
class UnsupportedRegularityError : public InputError {
public:
    using InputError::InputError;
};

// The repair class of the input does not admit the requested asymptotic term.
class CaseError : public InputError {
public:
    using InputError::InputError;
};

class NonConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllConditionedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MisfitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class WindowTooSmallError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ToleranceDominatedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace stablewalk
