/*
 * Copyright 2026 The AdaSeek Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADASEEK_ERRORS_HPP
#define ADASEEK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adaseek {

/// Malformed space / surface / manifest documents.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed a value outside the operation's domain.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition on object state was violated (e.g. extending a static cog).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Refusal because an enumeration would be too large.
class SizeError : public std::runtime_error {
public:
    SizeError(const std::string& what, double size) : std::runtime_error(what), size_(size) {}
    double size() const noexcept { return size_; }

private:
    double size_;
};

/// A persisted line-oriented file could not be parsed.
class CorruptFileError : public std::runtime_error {
public:
    CorruptFileError(std::string file, std::size_t line, const std::string& detail)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + detail), file_(std::move(file)), line_(line)
    {
    }
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

} // namespace adaseek

#endif
