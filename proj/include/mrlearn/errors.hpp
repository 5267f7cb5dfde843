#pragma once

#include <stdexcept>
#include <string>

namespace mrlearn {

// Error taxonomy. Each condition named by the operation contracts gets its
// own type so callers and tests can catch precisely.

struct UnknownObservation : std::runtime_error {
    explicit UnknownObservation(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownNode : std::runtime_error {
    explicit UnknownNode(const std::string& what) : std::runtime_error(what) {}
};

struct AlphabetMismatch : std::runtime_error {
    explicit AlphabetMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyAlphabet : std::runtime_error {
    explicit EmptyAlphabet(const std::string& what) : std::runtime_error(what) {}
};

struct LengthMismatch : std::runtime_error {
    explicit LengthMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct TableIncomplete : std::runtime_error {
    explicit TableIncomplete(const std::string& what) : std::runtime_error(what) {}
};

struct NotACounterexample : std::runtime_error {
    explicit NotACounterexample(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedHistory : std::runtime_error {
    explicit MalformedHistory(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedTrace : std::runtime_error {
    explicit MalformedTrace(const std::string& what) : std::runtime_error(what) {}
};

struct UndefinedAction : std::runtime_error {
    explicit UndefinedAction(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidGamma : std::runtime_error {
    explicit InvalidGamma(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyModel : std::runtime_error {
    explicit EmptyModel(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyTrace : std::runtime_error {
    explicit EmptyTrace(const std::string& what) : std::runtime_error(what) {}
};

struct PartialStrategy : std::runtime_error {
    explicit PartialStrategy(const std::string& what) : std::runtime_error(what) {}
};

struct IterationLimit : std::runtime_error {
    explicit IterationLimit(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidApf : std::runtime_error {
    explicit InvalidApf(const std::string& what) : std::runtime_error(what) {}
};

struct ModelParseError : std::runtime_error {
    explicit ModelParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelInvalid : std::runtime_error {
    explicit ModelInvalid(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mrlearn
