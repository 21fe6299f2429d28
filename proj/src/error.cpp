#include "rer/error.hpp"

namespace rer {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::domain: return "domain";
        case ErrorKind::parse: return "parse";
        case ErrorKind::io: return "io";
        case ErrorKind::contract: return "contract";
        case ErrorKind::budget: return "budget";
        case ErrorKind::infeasible: return "infeasible";
    }
    return "unknown";
}

}  // namespace rer
