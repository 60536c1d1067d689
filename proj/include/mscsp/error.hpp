// Copyright 2026 The mscsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mscsp {

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when two arrays that must agree in shape do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Text-format parse failure with a 1-based line number (0 when not line-bound).
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& message)
        : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
          source_(std::move(source)), line_(line), message_(message) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string source_;
    std::size_t line_;
    std::string message_;
};

} // namespace mscsp
