#pragma once

#include <stdexcept>
#include <string>

namespace gauntlet {

// Base for all harness errors. Subclasses distinguish the failure domains
// the pipeline reacts to differently (scored vs. aborted vs. skipped).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed JSON input (problem files, wire payloads, rule files).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Structurally valid JSON that violates the schema or an invariant.
// Carries the offending field name.
class SchemaError : public Error {
public:
    SchemaError(const std::string& field, const std::string& detail)
        : Error("schema error in field '" + field + "': " + detail), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Two registry files share a problem_id.
class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& msg) : Error(msg) {}
};

// Network-level failure talking to a remote agent (connect, timeout).
class TransportError : public Error {
public:
    explicit TransportError(const std::string& msg) : Error(msg) {}
};

// Remote agent answered, but the payload breaks the wire contract.
class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& msg) : Error(msg) {}
};

// Sandbox infrastructure fault (workspace creation, spawn failure).
// Distinct from a compilation/run failure, which is a scored outcome.
class SandboxError : public Error {
public:
    explicit SandboxError(const std::string& msg) : Error(msg) {}
};

// Server could not bind its port.
class BindError : public Error {
public:
    explicit BindError(const std::string& msg) : Error(msg) {}
};

// Judge backend returned a verdict outside its contract.
class JudgeProtocolError : public Error {
public:
    explicit JudgeProtocolError(const std::string& msg) : Error(msg) {}
};

// Output extraction could not produce the expected values.
class ExtractionError : public Error {
public:
    explicit ExtractionError(const std::string& msg) : Error(msg) {}
};

// Invalid scoring weights or harness configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// The evaluation run itself is unusable (tool server unreachable mid-run).
// Runs hitting this are reported as invalid, never scored as zero.
class InfrastructureError : public Error {
public:
    explicit InfrastructureError(const std::string& msg) : Error(msg) {}
};

}  // namespace gauntlet
