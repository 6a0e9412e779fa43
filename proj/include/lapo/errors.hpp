#pragma once

#include <stdexcept>
#include <string>

namespace lapo {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes (config/validation -> 2, I/O -> 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A statistic was requested over a sample with no correct rollouts.
class EmptySample : public Error {
public:
    EmptySample();
};

/// Invalid configuration value or missing mode argument.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Exact-guidance reward requested for a rollout that declares no budget.
class BudgetMissing : public Error {
public:
    BudgetMissing();
};

class EmptyBenchmark : public Error {
public:
    EmptyBenchmark();
};

class InsufficientTiers : public Error {
public:
    explicit InsufficientTiers(std::size_t tiers);
};

/// A persisted artifact failed schema or invariant checks. The message
/// carries the offending key path (e.g. `entries.q7.target`).
class ValidationError : public Error {
public:
    ValidationError(const std::string& key_path, const std::string& what);

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lapo
