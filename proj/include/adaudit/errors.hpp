#pragma once

#include <stdexcept>
#include <string>

namespace adaudit {

// Configuration or schema problem: bad/missing config keys, unmapped columns.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// File could not be opened/read/written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Caller-supplied data violates a documented precondition.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Not enough eligible individuals to satisfy a sampling request.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// An invariant that upstream construction should have guaranteed is broken.
struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

// Platform client failure. Retryable failures are transport-level; callers
// may re-issue the request.
struct PlatformError : std::runtime_error {
    PlatformError(const std::string& what, bool retryable_)
        : std::runtime_error(what), retryable(retryable_) {}
    bool retryable = false;
};

// A statistical test cannot be evaluated on the given counts.
struct StatsError : std::runtime_error {
    explicit StatsError(const std::string& what) : std::runtime_error(what) {}
};

// A pipeline stage referenced an artifact that does not exist yet.
struct MissingArtifactError : std::runtime_error {
    explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace adaudit
