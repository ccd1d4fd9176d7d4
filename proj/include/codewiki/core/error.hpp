// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace codewiki {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input failed schema or invariant validation (bad rubric, bad tree split, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A remote model (or its mock stand-in) could not produce a usable answer.
class RemoteModelError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant broken; indicates a bug in a producer upstream.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace codewiki
