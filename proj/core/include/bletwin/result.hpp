#pragma once

#include <string>
#include <utility>
#include <variant>

namespace bletwin {

/// Failure modes of the decode path, from access-address search down to PDU parsing.
enum class DecodeError {
    AccessAddressMismatch,
    CrcMismatch,
    MalformedLength,
    UnknownPduType,
    Oversize,
    NoSignal,
    NoDetection,
    TooShort,
};

const char* to_string(DecodeError e);

/// Minimal result type: either a value or a DecodeError.
template <typename T>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(DecodeError err) : v_(err) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(v_); }
    T& value() & { return std::get<T>(v_); }
    T&& value() && { return std::get<T>(std::move(v_)); }
    DecodeError error() const { return std::get<DecodeError>(v_); }

private:
    std::variant<T, DecodeError> v_;
};

}  // namespace bletwin
