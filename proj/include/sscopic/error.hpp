#pragma once

#include <stdexcept>
#include <string>

namespace sscopic {

/// Error categories. The numeric value doubles as the CLI exit code.
enum class ErrorCode : int {
    InvalidArgument = 3,
    DegenerateInput = 4,
    InvalidMixture = 5,
    DegenerateConditioner = 6,
    InsufficientConditioning = 7,
    SamplerFailure = 8,
    UnsupportedVariant = 9,
    Resolution = 10,
    CoherencePresent = 11,
    Parse = 12,
    ModeMismatch = 13,
    SoundnessViolation = 14,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

}  // namespace sscopic
