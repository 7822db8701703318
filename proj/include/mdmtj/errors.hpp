#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mdmtj {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigParseError : public Error {
public:
    ConfigParseError(std::size_t line, std::string key, const std::string& what)
        : Error("line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") + ": " + what),
          line_(line), key_(std::move(key)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

class ConfigInvariantError : public Error {
public:
    ConfigInvariantError(std::string key, const std::string& what)
        : Error(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class InvalidPattern : public Error {
public:
    InvalidPattern(std::string argument, const std::string& what)
        : Error("invalid pattern '" + argument + "': " + what), argument_(std::move(argument)) {}

    const std::string& argument() const noexcept { return argument_; }

private:
    std::string argument_;
};

class DegenerateCoverage : public Error {
public:
    using Error::Error;
};

class DomainCountTooLarge : public Error {
public:
    using Error::Error;
};

class DomainCountTooSmall : public Error {
public:
    using Error::Error;
};

class ClustersOverlap : public Error {
public:
    using Error::Error;
};

class OffsetOutOfRange : public Error {
public:
    using Error::Error;
};

class EmptyNetwork : public Error {
public:
    using Error::Error;
};

} // namespace mdmtj
