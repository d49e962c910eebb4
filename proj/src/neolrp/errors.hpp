// Copyright 2026 The neolrp Authors
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

#ifndef NEOLRP_ERRORS_HPP_
#define NEOLRP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace neolrp {

// Numeric values are part of the C ABI (see include/neolrp/neolrp.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParse = 2,
  kValidation = 3,
  kConfig = 4,
  kIo = 5,
  kShape = 6,
  kGenerationStall = 7,
  kSize = 8,
  kTraining = 9,
  kBackend = 10,
  kMetric = 11,
  kMissingArtifact = 12,
  kInternal = 99,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& section, int line, const std::string& message)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + " (" +
                                     section + "): " + message),
        section_(section),
        line_(line) {}

  const std::string& section() const { return section_; }
  int line() const { return line_; }

 private:
  std::string section_;
  int line_;
};

}  // namespace neolrp

#endif  // NEOLRP_ERRORS_HPP_
