#pragma once

#include <stdexcept>
#include <string>

namespace ctrlcmp {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problems with the input data or configuration (CLI exit code 2).
class DataError : public Error {
public:
    using Error::Error;
};

/// Failures inside the statistical machinery (CLI exit code 3).
class StatError : public Error {
public:
    using Error::Error;
};

class SchemaError : public DataError {
public:
    explicit SchemaError(const std::string& column)
        : DataError("ingest: schema error, column '" + column + "'"), column_(column) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class ParseError : public DataError {
public:
    ParseError(long row, std::string column, std::string token)
        : DataError("ingest: parse error at row " + std::to_string(row) + ", column '" + column +
                    "', token '" + token + "'"),
          row_(row), column_(std::move(column)), token_(std::move(token)) {}
    long row() const { return row_; }
    const std::string& column() const { return column_; }
    const std::string& token() const { return token_; }

private:
    long row_;
    std::string column_;
    std::string token_;
};

class EmptyFileError : public DataError {
public:
    using DataError::DataError;
};

class ConfigError : public DataError {
public:
    ConfigError(const std::string& key, const std::string& constraint)
        : DataError("config: key '" + key + "' violates " + constraint), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Comfort settings differ between the two datasets, so the comparison is invalid.
class IncomparableConfigs : public DataError {
public:
    using DataError::DataError;
};

/// The common OAT support of the two datasets is too narrow to compare on.
class InsufficientOverlap : public DataError {
public:
    using DataError::DataError;
};

/// Too few points (or too few distinct covariate values) to fit.
class InsufficientData : public DataError {
public:
    using DataError::DataError;
};

/// An integration interval [a, b] with a >= b, or an hour with no usable interval.
class EmptyIntervalError : public DataError {
public:
    using DataError::DataError;
};

/// Fewer than the minimum number of in-window points even after widening.
class DegenerateNeighborhood : public StatError {
public:
    using StatError::StatError;
};

/// Every candidate bandwidth produced degenerate fits.
class BandwidthFailure : public StatError {
public:
    using StatError::StatError;
};

/// Too many bootstrap replicates had to be discarded.
class TestFailure : public StatError {
public:
    using StatError::StatError;
};

/// All bootstrap replicates produced the same statistic value.
class DegenerateBootstrap : public StatError {
public:
    using StatError::StatError;
};

}  // namespace ctrlcmp
