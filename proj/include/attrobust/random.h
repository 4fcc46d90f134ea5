// Copyright 2026 The attrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef ATTROBUST_RANDOM_H_
#define ATTROBUST_RANDOM_H_

#include <cstdint>
#include <string_view>

#include "attrobust/vocabulary.h"

namespace attrobust {

// Derives a named sub-seed from a master seed (splitmix64 finalizer over the
// master seed mixed with the FNV-1a hash of the name).
inline uint64_t SubSeed(uint64_t master, std::string_view name) {
  uint64_t z = master ^ Fnv1a64(name);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace attrobust

#endif  // ATTROBUST_RANDOM_H_
