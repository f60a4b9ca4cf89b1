// Copyright 2026 The ACS Authors
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

#ifndef ACS_ERROR_H_
#define ACS_ERROR_H_

#include <stdexcept>
#include <string>

namespace acs {

// Base of every error the library raises. The CLI maps the concrete
// subclass onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments that can never work (bad flags, bad config).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input records violate a schema or invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// An external process or endpoint failed or returned garbage.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace acs

#endif  // ACS_ERROR_H_
