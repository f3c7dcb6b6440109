// Copyright 2026 The CFL Authors.
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

#include "cfl/hash.h"

#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <vector>

#include "cfl/error.h"

namespace cfl {

ContentHash& ContentHash::Update(std::span<const unsigned char> bytes) {
  for (unsigned char b : bytes) {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

ContentHash& ContentHash::Update(std::string_view text) {
  Update(static_cast<std::uint64_t>(text.size()));
  return Update(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

ContentHash& ContentHash::Update(double value) {
  return Update(std::bit_cast<std::uint64_t>(value));
}

ContentHash& ContentHash::Update(std::uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  return Update(std::span<const unsigned char>(bytes, 8));
}

std::string ContentHash::Hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(state_));
  return buf;
}

std::string HashFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return ContentHash().Update(bytes).Hex();
}

}  // namespace cfl
