#pragma once

#include <stdexcept>
#include <string>

namespace heartwood {

// Exit codes used by the CLI: 0 ok, 2 input error, 3 resource budget,
// 4 internal invariant breach.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
    static constexpr int exit_code = 2;
};

struct ResourceError : std::runtime_error {
    long long required = 0;
    explicit ResourceError(const std::string& what, long long required_budget = 0)
        : std::runtime_error(what), required(required_budget) {}
    static constexpr int exit_code = 3;
};

struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
    static constexpr int exit_code = 4;
};

struct OutOfBallError : std::runtime_error {
    explicit OutOfBallError(const std::string& what) : std::runtime_error(what) {}
    static constexpr int exit_code = 2;
};

struct DepthError : std::runtime_error {
    explicit DepthError(const std::string& what) : std::runtime_error(what) {}
    static constexpr int exit_code = 2;
};

inline void internal_check(bool cond, const char* msg) {
    if (!cond) throw InternalError(msg);
}

} // namespace heartwood
