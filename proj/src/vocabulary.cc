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


#include "attrobust/vocabulary.h"

#include <fstream>

#include "attrobust/errors.h"

namespace attrobust {

uint64_t Fnv1a64(std::string_view data, uint64_t seed) {
  uint64_t hash = seed;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

Vocabulary::Vocabulary() {
  Add(kPadToken);
  Add(kUnknownToken);
  Add(kMaskToken);
}

int Vocabulary::Add(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  const int id = size();
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

bool Vocabulary::Contains(std::string_view word) const {
  return index_.count(std::string(word)) > 0;
}

int Vocabulary::Id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnknownId : it->second;
}

const std::string& Vocabulary::Word(int id) const {
  if (id < 0 || id >= size()) {
    throw LookupError("word id " + std::to_string(id) +
                      " outside vocabulary of size " + std::to_string(size()));
  }
  return words_[id];
}

uint64_t Vocabulary::ContentHash() const {
  uint64_t hash = Fnv1a64("");
  for (const std::string& w : words_) {
    hash = Fnv1a64(w, hash);
    hash = Fnv1a64("\n", hash);
  }
  return hash;
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary to " + path);
  for (const std::string& w : words_) out << w << '\n';
}

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open vocabulary " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < 3 || lines[0] != kPadToken || lines[1] != kUnknownToken ||
      lines[2] != kMaskToken) {
    throw ParseError("vocabulary must start with the special tokens", 1);
  }
  Vocabulary vocab;
  for (size_t i = 3; i < lines.size(); ++i) {
    if (lines[i].empty() || vocab.Contains(lines[i])) {
      throw ParseError("empty or duplicate vocabulary entry",
                       static_cast<int>(i + 1));
    }
    vocab.Add(lines[i]);
  }
  return vocab;
}

}  // namespace attrobust
