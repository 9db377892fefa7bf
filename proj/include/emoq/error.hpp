#pragma once

#include <stdexcept>
#include <string>

namespace emoq {

// Base of every error the library raises. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file or resource could not be read.
class LoadError : public Error {
public:
    using Error::Error;
};

// Input parsed but contained no usable records.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// Graph shape violations: zero or several roots, reply cycles.
class StructuralError : public Error {
public:
    using Error::Error;
};

// Unknown node / comment id.
class LookupError : public Error {
public:
    using Error::Error;
};

// Event time went backwards.
class ClockError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Paired reports that do not describe the same input.
class MismatchError : public Error {
public:
    using Error::Error;
};

// External toxicity provider failure (network, auth, bad response).
class ProviderError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace emoq
