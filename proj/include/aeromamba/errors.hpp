// Copyright 2026 The aeromamba Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AEROMAMBA_ERRORS_HPP_
#define AEROMAMBA_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aeromamba {

// Every failure raised by the library derives from Error. The CLI maps the
// concrete kind onto its exit-code scheme (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an invalid value or mismatched shapes.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents; carries the byte offset where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Well-formed file using a codec or version this library does not handle.
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Broken precondition between components (missing saved activations,
// mismatched checkpoint, out-of-order stream chunk, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// 0 ok, 2 usage, 3 I/O, 4 numeric/contract.
int exit_code(const std::exception& e);

}  // namespace aeromamba

#endif  // AEROMAMBA_ERRORS_HPP_
