// Copyright 2026 The nppkit Authors.
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

#include "nppkit/random.h"

#include <limits>

#include "nppkit/status.h"

namespace nppkit {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a64(std::string_view data) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

uint64_t DeriveSeed(uint64_t global_seed, std::string_view record_id) {
  return SplitMix64(SplitMix64(global_seed) ^ Fnv1a64(record_id));
}

uint64_t Rng::Uniform(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "Uniform(0)");
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  // 2^64 mod n; draws in the top `rem` values would bias the modulo.
  const uint64_t rem = (kMax % n + 1) % n;
  uint64_t x = engine_();
  while (rem != 0 && x > kMax - rem) x = engine_();
  return x % n;
}

}  // namespace nppkit
