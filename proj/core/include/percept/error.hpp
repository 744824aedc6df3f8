/* Copyright 2026 The PerceptCane Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef PERCEPT_ERROR_HPP_
#define PERCEPT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace percept {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, violated preconditions, missing data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A perception or speech backend failed while serving a request.
class BackendError : public Error {
 public:
  BackendError(std::string backend_id, const std::string& cause)
      : Error("backend '" + backend_id + "' failed: " + cause),
        backend_id_(std::move(backend_id)),
        cause_(cause) {}

  const std::string& backend_id() const { return backend_id_; }
  const std::string& cause() const { return cause_; }

 private:
  std::string backend_id_;
  std::string cause_;
};

}  // namespace percept

#endif  // PERCEPT_ERROR_HPP_
