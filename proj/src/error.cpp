#include "flexti2v/error.hpp"

namespace flexti2v {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config error";
        case ErrorKind::Dimension: return "dimension error";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Io: return "io error";
        case ErrorKind::Transport: return "transport failure";
        case ErrorKind::Protocol: return "protocol error";
        case ErrorKind::Worker: return "worker error";
    }
    return "error";
}

Error Error::with_context(std::string_view context) const {
    std::string message(context);
    message += ": ";
    message += what();
    return Error(kind_, message);
}

void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace flexti2v
