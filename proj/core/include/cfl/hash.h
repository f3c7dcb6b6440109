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

#ifndef CFL_HASH_H_
#define CFL_HASH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace cfl {

// Incremental 64-bit FNV-1a. Used for content keys and report input hashes,
// not for security.
class ContentHash {
 public:
  ContentHash& Update(std::span<const unsigned char> bytes);
  ContentHash& Update(std::string_view text);
  ContentHash& Update(double value);
  ContentHash& Update(std::uint64_t value);

  std::uint64_t value() const { return state_; }
  std::string Hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string HashFile(const std::string& path);

}  // namespace cfl

#endif  // CFL_HASH_H_
