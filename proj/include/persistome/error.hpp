#pragma once

#include <stdexcept>
#include <string>

namespace persistome {

/// Toolkit-wide error type. `code` is a stable machine-parseable tag
/// (e.g. "parse", "simplex_cap", "bad_argument"); `what()` carries the
/// human-readable one-line message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

} // namespace persistome
