#pragma once

#include <stdexcept>
#include <string>

namespace placeloc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad argument, mismatched sizes).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data could not be read or is malformed (files, manifests, models).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace placeloc
