// Copyright 2026 The ametk Authors
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

#ifndef AMETK_ERROR_HPP_
#define AMETK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ametk {

// Bad input data: malformed files, misaligned corpora, invalid tables.
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Bad invocation: contradictory flags or config values.
// The CLI maps this to exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ametk

#endif  // AMETK_ERROR_HPP_
