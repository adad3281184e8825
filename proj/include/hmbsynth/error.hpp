// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmbsynth {

enum class ErrorCode {
    NotFound,
    DecodeError,
    UnsupportedBitDepth,
    IoError,
    InvalidParams,
    EmptyTrajectory,
    UnknownGroup,
    EmptyGroupMask,
    KernelTooLarge,
    ShapeMismatch,
    DegenerateOutput,
    EncodeError,
    IndexOutOfRange,
    InvalidTimestepOrder,
    NegativeRadicand,
    NegativeTerm,
    ZeroOriginal,
    ParseError,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace hmbsynth
