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

// Quick property checks run by `attrobust selftest` on random small models.

#ifndef ATTROBUST_SELFTEST_H_
#define ATTROBUST_SELFTEST_H_

#include <cstdint>
#include <string>
#include <vector>

namespace attrobust {

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Gradient vs central differences, IG completeness, DeepLIFT summation to
// delta, greedy attack vs exhaustive search, and multilabel additivity.
std::vector<SelfTestCheck> RunSelfTest(uint64_t seed = 7);

}  // namespace attrobust

#endif  // ATTROBUST_SELFTEST_H_
