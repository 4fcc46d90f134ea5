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


#include "attrobust/text_sample.h"

#include <algorithm>
#include <cctype>

#include "attrobust/errors.h"

namespace attrobust {

std::string_view TaskModeName(TaskMode mode) {
  return mode == TaskMode::kMultilabel ? "multilabel" : "single-label";
}

TaskMode ParseTaskMode(std::string_view name) {
  if (name == "multilabel") return TaskMode::kMultilabel;
  if (name == "single-label" || name == "single") return TaskMode::kSingleLabel;
  throw ConfigError("unknown task mode '" + std::string(name) + "'");
}

LabelSet::LabelSet(std::vector<int> labels, TaskMode mode)
    : labels_(std::move(labels)), mode_(mode) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

bool LabelSet::Contains(int label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

void LabelSet::Validate(int num_classes) const {
  if (mode_ == TaskMode::kSingleLabel && labels_.size() != 1) {
    throw ConfigError("single-label sample must carry exactly one label");
  }
  for (int l : labels_) {
    if (l < 0 || l >= num_classes) {
      throw ConfigError("label index " + std::to_string(l) +
                        " outside label inventory of size " +
                        std::to_string(num_classes));
    }
  }
}

std::string TextSample::Text() const {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TextSample MakeSample(std::string id, const std::vector<std::string>& tokens,
                      const Vocabulary& vocab, LabelSet labels,
                      std::string raw_text) {
  TextSample sample;
  sample.id = std::move(id);
  sample.tokens = tokens;
  sample.ids.reserve(tokens.size());
  for (const std::string& t : tokens) sample.ids.push_back(vocab.Id(t));
  sample.labels = std::move(labels);
  sample.raw_text = raw_text.empty() ? sample.Text() : std::move(raw_text);
  return sample;
}

TextSample WithSubstitution(const TextSample& sample, int position,
                            const std::string& word, const Vocabulary& vocab) {
  if (position < 0 || position >= sample.size()) {
    throw LookupError("substitution position " + std::to_string(position) +
                      " outside sample of length " +
                      std::to_string(sample.size()));
  }
  TextSample out = sample;
  out.tokens[position] = word;
  out.ids[position] = vocab.Id(word);
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace attrobust
