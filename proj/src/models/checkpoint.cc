// src/models/checkpoint.cc

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

#include "bwex/checkpoint.h"

#include <cstring>
#include <fstream>
#include <utility>
#include <vector>

#include "bwex/common.h"

namespace bwex {

namespace {

constexpr char kMagic[8] = {'B', 'W', 'E', 'X', 'C', 'K', 'P', '1'};

void PutU64(std::string* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutBytes(std::string* out, const void* p, size_t n) {
  out->append(reinterpret_cast<const char*>(p), n);
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  uint64_t U64() {
    BWEX_RUNTIME_CHECK(pos + 8 <= buf.size(), "truncated checkpoint");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::string Str(size_t n) {
    BWEX_RUNTIME_CHECK(pos + n <= buf.size(), "truncated checkpoint");
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  void Doubles(double* dst, size_t n) {
    BWEX_RUNTIME_CHECK(pos + 8 * n <= buf.size(), "truncated checkpoint");
    std::memcpy(dst, buf.data() + pos, 8 * n);
    pos += 8 * n;
  }
};

}  // namespace

uint64_t Fnv1aHash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& c) {
  std::string out;
  PutBytes(&out, kMagic, 8);
  PutU64(&out, c.config_json.size());
  out.append(c.config_json);
  PutU64(&out, Fnv1aHash(c.config_json));
  PutU64(&out, c.tensors.size());
  for (const auto& [name, arr] : c.tensors) {
    PutU64(&out, name.size());
    out.append(name);
    PutU64(&out, static_cast<uint64_t>(arr.Rank()));
    for (int64_t d = 0; d < arr.Rank(); ++d)
      PutU64(&out, static_cast<uint64_t>(arr.Dim(d)));
    PutBytes(&out, arr.Data(), static_cast<size_t>(arr.NumEl()) * 8);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  BWEX_RUNTIME_CHECK(f.good(), "cannot open for write: ", path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  BWEX_RUNTIME_CHECK(f.good(), "short write: ", path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  BWEX_RUNTIME_CHECK(f.good(), "cannot open: ", path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  Reader r{buf};
  const std::string magic = r.Str(8);
  BWEX_RUNTIME_CHECK(std::memcmp(magic.data(), kMagic, 8) == 0,
                     "not a checkpoint file: ", path);
  Checkpoint c;
  c.config_json = r.Str(r.U64());
  const uint64_t stored_hash = r.U64();
  BWEX_RUNTIME_CHECK(stored_hash == Fnv1aHash(c.config_json),
                     "checkpoint config hash mismatch (corrupt file): ", path);
  const uint64_t count = r.U64();
  for (uint64_t i = 0; i < count; ++i) {
    const std::string name = r.Str(r.U64());
    const int64_t rank = static_cast<int64_t>(r.U64());
    BWEX_RUNTIME_CHECK(rank >= 1 && rank <= 8, "bad tensor rank in ", path);
    std::vector<int64_t> dims(static_cast<size_t>(rank));
    for (int64_t d = 0; d < rank; ++d) dims[static_cast<size_t>(d)] = static_cast<int64_t>(r.U64());
    Array a(dims);
    r.Doubles(a.Data(), static_cast<size_t>(a.NumEl()));
    BWEX_RUNTIME_CHECK(c.tensors.emplace(name, std::move(a)).second,
                       "duplicate tensor name ", name, " in ", path);
  }
  BWEX_RUNTIME_CHECK(r.pos == buf.size(), "trailing bytes in ", path);
  return c;
}

Checkpoint LoadCheckpoint(const std::string& path,
                          const std::string& expected_config_json) {
  Checkpoint c = LoadCheckpoint(path);
  BWEX_CHECK(Fnv1aHash(c.config_json) == Fnv1aHash(expected_config_json),
             "checkpoint config does not match: expected ",
             expected_config_json, " but file holds ", c.config_json);
  return c;
}

std::map<std::string, Array> ParamsToTensors(
    const std::vector<nn::Parameter>& params) {
  std::map<std::string, Array> out;
  for (const nn::Parameter& p : params) {
    BWEX_CHECK(out.emplace(p.name, p.t.Value()).second,
               "duplicate parameter name ", p.name);
  }
  return out;
}

void AssignParams(const std::map<std::string, Array>& tensors,
                  const std::vector<nn::Parameter>& params) {
  BWEX_CHECK(tensors.size() == params.size(),
             "parameter count mismatch: ", tensors.size(), " tensors vs ",
             params.size(), " parameters");
  for (const nn::Parameter& p : params) {
    auto it = tensors.find(p.name);
    BWEX_CHECK(it != tensors.end(), "missing tensor for parameter ", p.name);
    BWEX_CHECK(it->second.SameShape(p.t.Value()), "shape mismatch for ",
               p.name, ": ", ShapeStr(it->second.dims), " vs ",
               ShapeStr(p.t.Value().dims));
    ag::Tensor handle = p.t;  // copies share the node
    handle.MutableValue() = it->second;
  }
}

}  // namespace bwex
