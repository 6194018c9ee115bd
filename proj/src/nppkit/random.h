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

#ifndef NPPKIT_RANDOM_H_
#define NPPKIT_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace nppkit {

// Per-record seed: a mix of the run seed and the record identifier, so that a
// record's random choices do not depend on processing order or parallelism.
uint64_t DeriveSeed(uint64_t global_seed, std::string_view record_id);

// Deterministic generator. Bounded draws use rejection sampling over
// std::mt19937_64, whose output sequence is fixed by the standard, so results
// are identical across standard library implementations (unlike
// std::uniform_int_distribution).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t Uniform(uint64_t n);

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nppkit

#endif  // NPPKIT_RANDOM_H_
