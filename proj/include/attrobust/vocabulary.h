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


#ifndef ATTROBUST_VOCABULARY_H_
#define ATTROBUST_VOCABULARY_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace attrobust {

// Dense word <-> id mapping. Ids 0, 1 and 2 are reserved for the padding,
// unknown and mask tokens.
class Vocabulary {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnknownId = 1;
  static constexpr int kMaskId = 2;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnknownToken = "<unk>";
  static constexpr std::string_view kMaskToken = "<mask>";

  Vocabulary();

  // Returns the id of `word`, inserting it if needed.
  int Add(std::string_view word);
  bool Contains(std::string_view word) const;
  // Unknown words map to kUnknownId.
  int Id(std::string_view word) const;
  // Throws LookupError for ids outside [0, size()).
  const std::string& Word(int id) const;
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

  // FNV-1a over the newline-joined word list; stored in checkpoints.
  uint64_t ContentHash() const;

  // One word per line, in id order (specials included).
  void Save(const std::string& path) const;
  static Vocabulary Load(const std::string& path);

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

uint64_t Fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace attrobust

#endif  // ATTROBUST_VOCABULARY_H_
