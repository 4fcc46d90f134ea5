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


#ifndef ATTROBUST_TEXT_SAMPLE_H_
#define ATTROBUST_TEXT_SAMPLE_H_

#include <string>
#include <string_view>
#include <vector>

#include "attrobust/vocabulary.h"

namespace attrobust {

enum class TaskMode { kSingleLabel, kMultilabel };

std::string_view TaskModeName(TaskMode mode);
TaskMode ParseTaskMode(std::string_view name);

// A set of class indices. Kept sorted and duplicate-free.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::vector<int> labels, TaskMode mode);

  const std::vector<int>& labels() const { return labels_; }
  TaskMode mode() const { return mode_; }
  bool empty() const { return labels_.empty(); }
  int size() const { return static_cast<int>(labels_.size()); }
  bool Contains(int label) const;

  // Throws ConfigError when an index is >= num_classes or a single-label set
  // does not hold exactly one label.
  void Validate(int num_classes) const;

  bool operator==(const LabelSet& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<int> labels_;
  TaskMode mode_ = TaskMode::kSingleLabel;
};

struct TextSample {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<int> ids;  // parallel to tokens
  LabelSet labels;
  std::string raw_text;

  int size() const { return static_cast<int>(ids.size()); }
  std::string Text() const;  // tokens joined by single spaces
};

// Builds a sample from whitespace tokens; unknown words map to <unk>.
TextSample MakeSample(std::string id, const std::vector<std::string>& tokens,
                      const Vocabulary& vocab, LabelSet labels,
                      std::string raw_text = {});

// Replaces the word at `position`, keeping tokens and ids in sync.
TextSample WithSubstitution(const TextSample& sample, int position,
                            const std::string& word, const Vocabulary& vocab);

std::vector<std::string> SplitWhitespace(std::string_view text);

struct Dataset {
  std::vector<TextSample> samples;
  std::vector<std::string> label_names;
  TaskMode mode = TaskMode::kSingleLabel;

  int num_classes() const { return static_cast<int>(label_names.size()); }
  int size() const { return static_cast<int>(samples.size()); }
};

}  // namespace attrobust

#endif  // ATTROBUST_TEXT_SAMPLE_H_
