#pragma once

#include <stdexcept>
#include <string>

namespace dfbs {

struct UnreachableError : std::runtime_error {
    explicit UnreachableError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoIntersectionError : std::runtime_error {
    explicit NoIntersectionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularError : std::runtime_error {
    explicit SingularError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSettledError : std::runtime_error {
    explicit NotSettledError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RankDeficientError : std::runtime_error {
    explicit RankDeficientError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularKktError : std::runtime_error {
    explicit SingularKktError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatchError : std::runtime_error {
    explicit DimensionMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InfeasibleLimitsError : std::runtime_error {
    explicit InfeasibleLimitsError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfWorkspaceError : std::runtime_error {
    explicit OutOfWorkspaceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dfbs
