#pragma once

#include <stdexcept>
#include <string>

namespace lcz {

/// Broad failure categories; mirrored by the C API status codes.
enum class Errc {
    io = 1,          // missing/unreadable/unwritable files, truncated payloads
    invalid = 2,     // violated preconditions or malformed inputs
    numeric = 3,     // non-finite values, diverged training
    unsupported = 4, // valid file but a dtype/option we do not handle
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Errc code, const std::string& msg) {
    if (!ok) fail(code, msg);
}

} // namespace lcz
