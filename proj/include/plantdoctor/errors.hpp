#pragma once

#include <stdexcept>
#include <string>

namespace plantdoctor {

// Base of every error the library throws. The subclasses map one-to-one onto
// the CLI exit statuses (usage / input / backend).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed something that violates a precondition: bad config, bad
// geometry, mismatched dimensions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Unreadable or malformed media (missing directory, zero-area frame, short
// raw stream).
class MediaError : public Error {
public:
    using Error::Error;
};

// A detector or segmenter backend could not be loaded or failed at inference.
class BackendError : public Error {
public:
    using Error::Error;
};

// Non-finite state or a singular matrix inside the Kalman machinery.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace plantdoctor
