#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheafdb {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands or morphisms disagree on semiring kind.
class KindError : public Error {
public:
    using Error::Error;
};

class DegenerateTotal : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

/// A column set is not a subset of the one it is required to be in.
class ColumnError : public Error {
public:
    using Error::Error;
};

/// Malformed schema, state label, or record.
class SchemaError : public Error {
public:
    using Error::Error;
};

class InvalidDelay : public Error {
public:
    using Error::Error;
};

class UnknownEvent : public Error {
public:
    using Error::Error;
};

class UnknownVersion : public Error {
public:
    using Error::Error;
};

/// The pairwise strict order (or an explicit DAG) contains a cycle.
class CausalityViolation : public Error {
public:
    CausalityViolation(const std::string& what, std::vector<std::string> cycle)
        : Error(what), cycle_(std::move(cycle)) {}
    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

/// An index has two incomparable maximal versions in the past of the
/// requested snapshot version.
class SnapshotConflict : public Error {
public:
    SnapshotConflict(const std::string& what, std::vector<std::int64_t> indices)
        : Error(what), indices_(std::move(indices)) {}
    const std::vector<std::int64_t>& indices() const noexcept { return indices_; }

private:
    std::vector<std::int64_t> indices_;
};

class ScenarioError : public Error {
public:
    using Error::Error;
};

class CompatibilityError : public Error {
public:
    using Error::Error;
};

class IncompatibleFamily : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class EditError : public Error {
public:
    using Error::Error;
};

class VacuousEdit : public EditError {
public:
    using EditError::EditError;
};

/// Input file could not be parsed; `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace sheafdb
