#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cord {

/// Position inside a source document, 1-based.
struct SourceLoc {
    std::string file;
    int line = 0;
    int col = 0;

    std::string str() const {
        return file + ":" + std::to_string(line) + ":" + std::to_string(col);
    }
};

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lexical or syntax error with a source location.
class ParseError : public Error {
public:
    ParseError(SourceLoc loc, const std::string& message)
        : Error(loc.str() + ": " + message), loc_(std::move(loc)) {}

    const SourceLoc& loc() const { return loc_; }

private:
    SourceLoc loc_;
};

/// Violated model invariant, unresolved identifier, bad cross reference.
class ValidationError : public Error {
public:
    using Error::Error;
    ValidationError(SourceLoc loc, const std::string& message)
        : Error(loc.str() + ": " + message) {}
};

/// Raised when an operation requires a perfect matching and none exists.
/// Carries a Hall-condition witness: equations whose joint neighborhood
/// is too small.
class NoPerfectMatchingError : public Error {
public:
    NoPerfectMatchingError(const std::string& message, std::vector<std::string> witness)
        : Error(message), witness_(std::move(witness)) {}

    const std::vector<std::string>& witness() const { return witness_; }

private:
    std::vector<std::string> witness_;
};

/// Numerical failure in the equilibrium lab.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace cord
