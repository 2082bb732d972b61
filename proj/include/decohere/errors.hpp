#pragma once

#include <stdexcept>
#include <string>

namespace decohere {

/// Input violates a documented precondition or type invariant.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configured size or work cap would be exceeded.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (non-convergent quadrature, no detectable decay, ...).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw domain_error(message);
}

} // namespace detail
} // namespace decohere
