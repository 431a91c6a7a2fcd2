// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace typobench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad JSON, unknown class names,
/// out-of-range parameters). Maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A model-backed provider failed (transport, HTTP status, malformed
/// payload). Maps to CLI exit code 3.
class ProviderError : public Error {
 public:
  enum class Kind { transport, timeout, http_status, malformed, dimension };

  ProviderError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace typobench
