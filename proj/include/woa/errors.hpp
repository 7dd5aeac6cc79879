#pragma once

#include <stdexcept>
#include <string>

namespace woa {

// All recoverable failures carry a short machine-readable kind tag plus a
// human message.  Kinds are matched by name in tests and by the CLI when
// mapping to exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace woa
