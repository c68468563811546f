#pragma once

#include <stdexcept>
#include <string>

namespace folearn {

// Raised when an algorithm exhausts its explicit work budget. Distinct from
// wrong answers and from learner rejection.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an internal invariant fails. These checks stay on in all build
// types; a fired check is a bug, not a recoverable condition.
struct InvariantViolation : std::logic_error {
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

namespace internal {

struct CheckStats {
    long long executed = 0;
    long long failed = 0;
};

inline CheckStats& check_stats() {
    static CheckStats stats;
    return stats;
}

}  // namespace internal

// Always-on invariant check with a global execution counter, so test suites
// can prove the checks were actually exercised.
inline void check(bool cond, const std::string& msg) {
    ++internal::check_stats().executed;
    if (!cond) {
        ++internal::check_stats().failed;
        throw InvariantViolation(msg);
    }
}

inline void require_input(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace folearn
