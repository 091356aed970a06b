#pragma once

#include <stdexcept>
#include <string>

namespace crumple {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (OBJ records, scenario files). Carries a 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
    explicit ParseError(const std::string& message) : Error(message), line_(0) {}

    int line() const { return line_; }

private:
    int line_;
};

/// Invalid configuration values or incompatible parameter combinations.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Degenerate or dimensionally deficient geometry (coplanar hull input, zero volume).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Binding table used against vertex/control counts it was not built for.
class BindingError : public Error {
public:
    using Error::Error;
};

/// Inconsistent inputs when assembling a vehicle world.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// File system problems: missing files, unwritable outputs.
class IoError : public Error {
public:
    using Error::Error;
};

/// Corrupt or truncated binary payloads (snapshots, binding sidecars).
class CodecError : public Error {
public:
    using Error::Error;
};

/// Non-finite state detected during a solver step.
class DivergedError : public Error {
public:
    DivergedError(const std::string& phase, int node)
        : Error("simulation diverged in phase '" + phase + "' at node " + std::to_string(node)),
          phase_(phase),
          node_(node) {}

    const std::string& phase() const { return phase_; }
    int node() const { return node_; }

private:
    std::string phase_;
    int node_;
};

}  // namespace crumple
