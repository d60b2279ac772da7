/*
 * Copyright 2026 The printsvm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace printsvm {

/// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV rows, HDL, JSON documents).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A precondition or type invariant was violated.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The simulated design did not behave like a sequential classifier.
class SimulationError : public Error {
public:
    using Error::Error;
};

/// Bad pipeline configuration or technology file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace printsvm
