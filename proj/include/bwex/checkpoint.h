// include/bwex/checkpoint.h

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

#ifndef BWEX_CHECKPOINT_H_
#define BWEX_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>

#include "bwex/array.h"
#include "bwex/nn.h"

namespace bwex {

// Self-describing parameter container: a config string (JSON by convention),
// its hash, and named tensors.  The reader rejects containers whose stored
// hash does not match the stored config, and callers can additionally demand
// that the config match their own.
struct Checkpoint {
  std::string config_json;
  std::map<std::string, Array> tensors;
};

uint64_t Fnv1aHash(const std::string& s);

void SaveCheckpoint(const std::string& path, const Checkpoint& c);
Checkpoint LoadCheckpoint(const std::string& path);
// Throws InvalidArgument when the stored config hash differs from the hash of
// expected_config_json.
Checkpoint LoadCheckpoint(const std::string& path,
                          const std::string& expected_config_json);

// Copies parameter values into a tensor map and back.  Assignment requires an
// exact one-to-one match between tensor names/shapes and parameter list.
std::map<std::string, Array> ParamsToTensors(
    const std::vector<nn::Parameter>& params);
void AssignParams(const std::map<std::string, Array>& tensors,
                  const std::vector<nn::Parameter>& params);

}  // namespace bwex

#endif  // BWEX_CHECKPOINT_H_
