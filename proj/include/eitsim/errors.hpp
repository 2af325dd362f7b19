// Copyright 2026 The eitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace eitsim {

/// Base class of every error raised by the library. `kind()` is a short
/// machine-readable tag used by the CLI error records.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

/// Rejected input: bad index, dimension mismatch, invalid parameter.
class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

/// Problem too large for the configured superoperator cap.
class CapacityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "capacity"; }
};

/// Liouvillian null space is not one-dimensional (or numerically close to it).
class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, double inverse_condition)
        : Error(what), inverse_condition_(inverse_condition) {}
    const char* kind() const noexcept override { return "degeneracy"; }
    double inverse_condition() const noexcept { return inverse_condition_; }

private:
    double inverse_condition_;
};

/// Steady-state residual above tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    const char* kind() const noexcept override { return "convergence"; }
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Explicit integrator blew up; retry with a smaller step.
class InstabilityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "instability"; }
};

/// Input outside the domain of a closed-form expression.
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

/// Extremum sits on the edge of the scanned window.
class EdgeExtremumError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "edge_extremum"; }
};

/// Malformed configuration text. Carries the offending key and 1-based line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key, int line)
        : Error(what), key_(std::move(key)), line_(line) {}
    const char* kind() const noexcept override { return "config"; }
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

}  // namespace eitsim
