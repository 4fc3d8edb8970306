// Small shared fixtures for the unit tests.
#ifndef TRAJKIT_TESTS_HELPERS_HPP_
#define TRAJKIT_TESTS_HELPERS_HPP_

#include "trajkit/core.hpp"

#include <doctest.h>

#include <functional>

namespace trajkit::test {

/// Runs `fn` and reports the ErrorKind it throws, if any.
inline std::optional<ErrorKind> thrown_kind(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

#define CHECK_KIND(expr, kind) CHECK(::trajkit::test::thrown_kind([&] { (void)(expr); }) == (kind))

} // namespace trajkit::test

#endif
