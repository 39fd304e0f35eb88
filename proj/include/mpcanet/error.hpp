#pragma once

#include <stdexcept>
#include <string>

namespace mpcanet {

/// Broad failure category; the CLI maps each one to a process exit code.
enum class ErrorKind {
    Config = 2,   // invalid arguments or configuration
    Data = 3,     // malformed files, shape mismatches, bad datasets
    Numeric = 4,  // degenerate or singular numerical problems
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Operand shapes do not conform.
class DimensionError : public DataError {
public:
    explicit DimensionError(const std::string& what) : DataError(what) {}
};

/// A binary container failed validation (bad magic, truncation, overflow).
class FormatError : public DataError {
public:
    explicit FormatError(const std::string& what) : DataError(what) {}
};

/// The leading magic bytes identify a different (or no) container.
class BadMagicError : public FormatError {
public:
    explicit BadMagicError(const std::string& what) : FormatError(what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

/// Training data carries no variance to learn a projection from.
class ZeroVarianceError : public NumericError {
public:
    explicit ZeroVarianceError(const std::string& what) : NumericError(what) {}
};

}  // namespace mpcanet
