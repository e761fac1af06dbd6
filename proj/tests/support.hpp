#pragma once

#include <ntheight/errors.hpp>

#include <optional>

namespace ntheight::testing {

// Runs f and reports the library error code it threw, if any.  Keeps the
// "this call must fail in exactly this way" assertions on one line.
template <class F>
std::optional<errc> thrown_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

} // namespace ntheight::testing
