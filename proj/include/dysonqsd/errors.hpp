/*
   Copyright 2026 The dysonqsd Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace dysonqsd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two coordinates coincide where a strictly ordered configuration is required.
class CollisionConfiguration : public Error {
public:
    using Error::Error;
};

class InvalidAlpha : public Error {
public:
    using Error::Error;
};

/// Newton solve of the proximal problem did not reach its residual tolerance.
/// Usually means dt or the penalty is too aggressive.
class ProxNoConvergence : public Error {
public:
    using Error::Error;
};

class InsufficientSurvivors : public Error {
public:
    using Error::Error;
};

class NoSurvivors : public Error {
public:
    using Error::Error;
};

/// Every Fleming-Viot particle left the region during the same step.
class EnsembleExtinct : public Error {
public:
    using Error::Error;
};

class BinningMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed configuration text; carries the offending line (1-based, 0 if unknown).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A configuration value that parsed but is out of range. field() names it.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace dysonqsd
