///
/// \file errors.hpp
///
#pragma once

#include <stdexcept>
#include <string>

namespace hankelmc
{

/// Malformed input: bad sizes, out-of-range parameters, bad files.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter outside the mathematical domain of an operation.
class DomainError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

/// The observation pattern makes completion impossible (e.g. a lifted
/// column with no more than `rank` observed entries).
class StructuralError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace hankelmc
