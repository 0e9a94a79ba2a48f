#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flexti2v {

enum class ErrorKind {
    Config,     // invalid parameter or configuration
    Dimension,  // tensor shapes disagree
    Parse,      // malformed file or document
    Domain,     // math outside its domain (e.g. division by zero noise level)
    Io,         // filesystem failure
    Transport,  // byte stream to a worker broke
    Protocol,   // worker sent bytes that violate the wire format
    Worker,     // worker replied with an Error message
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Same kind, message prefixed with `context: `.
    Error with_context(std::string_view context) const;

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace flexti2v
