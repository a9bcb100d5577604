#pragma once

#include <stdexcept>
#include <string>

namespace hyrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file does not have the expected columns or header.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A single input row could not be parsed.
class RowError : public Error {
public:
    RowError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value parsed correctly but violates a declared bound.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Tensor shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Index outside its valid range (vocabulary, embedding table).
class IndexError : public Error {
public:
    using Error::Error;
};

/// Invalid hyperparameter or configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Checkpoint or dataset file is unreadable, corrupted or of the wrong version.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace hyrec
