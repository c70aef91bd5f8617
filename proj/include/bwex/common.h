// include/bwex/common.h

// Copyright 2026  bwex authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef BWEX_COMMON_H_
#define BWEX_COMMON_H_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bwex {

// Errors raised for violated call contracts (bad shapes, bad configs, bad
// files).  Runtime failures that are not caller mistakes (NaN divergence,
// unreadable file contents) use RuntimeError.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& msg) : std::runtime_error(msg) {}
};

void LogWarning(const std::string& msg);
void LogInfo(const std::string& msg);

namespace internal {
inline void StreamInto(std::ostringstream&) {}
template <typename T, typename... Rest>
void StreamInto(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  StreamInto(os, rest...);
}
}  // namespace internal

template <typename... Args>
std::string StrCat(const Args&... args) {
  std::ostringstream os;
  internal::StreamInto(os, args...);
  return os.str();
}

}  // namespace bwex

#define BWEX_CHECK(cond, ...)                                              \
  do {                                                                     \
    if (!(cond)) {                                                         \
      throw ::bwex::InvalidArgument(                                       \
          ::bwex::StrCat("check failed: ", #cond, ": ", __VA_ARGS__));     \
    }                                                                      \
  } while (0)

#define BWEX_RUNTIME_CHECK(cond, ...)                                      \
  do {                                                                     \
    if (!(cond)) {                                                         \
      throw ::bwex::RuntimeError(::bwex::StrCat(__VA_ARGS__));             \
    }                                                                      \
  } while (0)

#endif  // BWEX_COMMON_H_
