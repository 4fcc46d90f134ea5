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

// Line-record datasets, text cleaning and deterministic splits.
//
// A dataset file holds one JSON object per line:
//
//   {"text": "took zoloft for months.", "labels": ["positive"]}
//
// An optional "id" string names the sample; otherwise the 1-based line
// number is used. Single-label datasets use one-element label lists.

#ifndef ATTROBUST_DATASET_IO_H_
#define ATTROBUST_DATASET_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrobust/text_sample.h"
#include "attrobust/vocabulary.h"

namespace attrobust {

struct PreprocessOptions {
  bool lowercase = true;
  bool keep_digits = false;
  // Kept in addition to ASCII letters and spaces.
  std::string retained_punctuation = ".,'-";

  bool operator==(const PreprocessOptions&) const = default;
};

// Lowercases, turns newlines into spaces, drops every character outside
// the retained set and collapses runs of spaces. Idempotent.
std::string Preprocess(std::string_view text,
                       const PreprocessOptions& options = {});

// Splits on spaces and detaches periods and commas into tokens of their own.
std::vector<std::string> Tokenize(std::string_view clean_text);

struct DatasetSpec {
  std::string path;
  std::string format = "jsonl";
  TaskMode task_mode = TaskMode::kSingleLabel;
  // Label inventory in class-index order; inferred (sorted) when empty.
  std::vector<std::string> labels;
  int max_length = 64;  // longer samples are truncated
  PreprocessOptions preprocess;

  void Validate() const;
  bool operator==(const DatasetSpec&) const = default;
};

struct LoadedDataset {
  // Samples carry tokens, labels and raw text; ids are assigned by
  // EncodeSamples once a vocabulary exists.
  Dataset dataset;
  std::vector<std::string> warnings;
  int malformed_lines = 0;
  int dropped_samples = 0;  // empty after preprocessing
};

// Throws ParseError when the file is empty or more than 1% of its non-blank
// lines are malformed; fewer malformed lines are skipped with a warning.
LoadedDataset LoadDataset(const DatasetSpec& spec);
LoadedDataset ParseDataset(std::string_view content, const DatasetSpec& spec);

// Vocabulary over the tokens of `samples`, words in order of first use.
Vocabulary BuildVocabulary(std::span<const TextSample> samples);
void EncodeSamples(std::span<TextSample> samples, const Vocabulary& vocab);

struct DatasetSplit {
  std::vector<TextSample> train;
  std::vector<TextSample> test;
  std::vector<TextSample> validation;
};

// 60/20/20 by count: test and validation get floor(n / 5) samples each and
// the residue goes to train. The shuffle depends only on `seed`; `fold`
// rotates the shuffled order so folds 0, 1, 2 have disjoint test sets.
DatasetSplit SplitDataset(std::span<const TextSample> samples, uint64_t seed,
                          int fold = 0);

}  // namespace attrobust

#endif  // ATTROBUST_DATASET_IO_H_
