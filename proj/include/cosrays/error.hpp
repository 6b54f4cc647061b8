#pragma once

#include <stdexcept>
#include <string>

namespace cosrays {

// Domain failures carry a short machine code plus a context string so the CLI
// can turn them into {"error","message","at"} without guessing.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string at = {})
        : std::runtime_error(message), code_(std::move(code)), at_(std::move(at)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& at() const noexcept { return at_; }

private:
    std::string code_;
    std::string at_;
};

} // namespace cosrays
