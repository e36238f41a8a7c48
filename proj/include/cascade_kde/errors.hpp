#pragma once

#include <stdexcept>
#include <string>

namespace cascade_kde {

/// Input data violates a precondition (length, finiteness, ordering, range).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A configuration or method specification is malformed.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A file could not be opened, read, or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cascade_kde
