#pragma once

#include <stdexcept>
#include <string>

namespace triekit {

enum class ErrorCode {
    alphabet_overflow,
    duplicate_key,
    invalid_input,
    invalid_handle,
    corrupt_trie,
    mark_order_violation,
    version_mismatch,
    io_error,
};

[[nodiscard]] inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::alphabet_overflow: return "ALPHABET_OVERFLOW";
        case ErrorCode::duplicate_key: return "DUPLICATE_KEY";
        case ErrorCode::invalid_input: return "INVALID_INPUT";
        case ErrorCode::invalid_handle: return "INVALID_HANDLE";
        case ErrorCode::corrupt_trie: return "CORRUPT_TRIE";
        case ErrorCode::mark_order_violation: return "MARK_ORDER_VIOLATION";
        case ErrorCode::version_mismatch: return "VERSION_MISMATCH";
        case ErrorCode::io_error: return "IO_ERROR";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace triekit
