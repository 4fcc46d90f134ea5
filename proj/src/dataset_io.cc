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


#include "attrobust/dataset_io.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "attrobust/errors.h"
#include "json.hpp"

namespace attrobust {

using json = nlohmann::json;

std::string Preprocess(std::string_view text, const PreprocessOptions& options) {
  std::string out;
  out.reserve(text.size());
  auto push_space = [&out] {
    if (!out.empty() && out.back() != ' ') out.push_back(' ');
  };
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
      push_space();
    } else if (std::isalpha(c) && c < 128) {
      out.push_back(options.lowercase ? static_cast<char>(std::tolower(c)) : raw);
    } else if (std::isdigit(c) && options.keep_digits) {
      out.push_back(raw);
    } else if (options.retained_punctuation.find(raw) != std::string::npos &&
               raw != '"') {
      out.push_back(raw);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> Tokenize(std::string_view clean_text) {
  std::vector<std::string> tokens;
  for (const std::string& piece : SplitWhitespace(clean_text)) {
    std::string word;
    for (char c : piece) {
      if (c == '.' || c == ',') {
        if (!word.empty()) tokens.push_back(std::move(word));
        word.clear();
        tokens.emplace_back(1, c);
      } else {
        word.push_back(c);
      }
    }
    if (!word.empty()) tokens.push_back(std::move(word));
  }
  return tokens;
}

void DatasetSpec::Validate() const {
  if (format != "jsonl") throw ConfigError("unsupported dataset format: " + format);
  if (max_length < 1) throw ConfigError("max_length must be at least 1");
  std::set<std::string> unique(labels.begin(), labels.end());
  if (unique.size() != labels.size()) {
    throw ConfigError("duplicate label in the label inventory");
  }
}

namespace {

struct Record {
  std::string id;
  std::string raw_text;
  std::vector<std::string> labels;
  int line = 0;
};

Record ParseRecord(const std::string& line, int line_number,
                   TaskMode mode) {
  json value = json::parse(line);
  if (!value.is_object()) throw ParseError("record is not an object", line_number);
  if (!value.contains("text") || !value["text"].is_string()) {
    throw ParseError("missing string field \"text\"", line_number);
  }
  if (!value.contains("labels") || !value["labels"].is_array()) {
    throw ParseError("missing list field \"labels\"", line_number);
  }
  Record record;
  record.line = line_number;
  record.raw_text = value["text"].get<std::string>();
  for (const json& label : value["labels"]) {
    if (!label.is_string()) throw ParseError("non-string label", line_number);
    record.labels.push_back(label.get<std::string>());
  }
  if (mode == TaskMode::kSingleLabel && record.labels.size() != 1) {
    throw ParseError("single-label record needs exactly one label", line_number);
  }
  if (value.contains("id")) {
    if (!value["id"].is_string()) throw ParseError("non-string id", line_number);
    record.id = value["id"].get<std::string>();
  } else {
    record.id = std::to_string(line_number);
  }
  return record;
}

}  // namespace

LoadedDataset ParseDataset(std::string_view content, const DatasetSpec& spec) {
  spec.Validate();
  std::vector<Record> records;
  std::vector<int> malformed;
  std::vector<std::string> messages;
  int lines = 0;
  std::istringstream in{std::string(content)};
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++lines;
    try {
      records.push_back(ParseRecord(line, line_number, spec.task_mode));
    } catch (const json::exception& e) {
      malformed.push_back(line_number);
      messages.push_back("line " + std::to_string(line_number) +
                         ": malformed record: " + e.what());
    } catch (const ParseError& e) {
      malformed.push_back(line_number);
      messages.push_back(std::string("malformed record: ") + e.what());
    }
  }
  if (lines == 0) throw ParseError("empty dataset", 0);
  if (static_cast<double>(malformed.size()) > 0.01 * lines) {
    throw ParseError(std::to_string(malformed.size()) + " of " +
                         std::to_string(lines) +
                         " lines are malformed (first: " + messages.front() +
                         ")",
                     malformed.front());
  }

  LoadedDataset loaded;
  loaded.malformed_lines = static_cast<int>(malformed.size());
  loaded.warnings = messages;
  Dataset& dataset = loaded.dataset;
  dataset.mode = spec.task_mode;
  dataset.label_names = spec.labels;
  if (dataset.label_names.empty()) {
    std::set<std::string> names;
    for (const Record& r : records) names.insert(r.labels.begin(), r.labels.end());
    dataset.label_names.assign(names.begin(), names.end());
  }
  std::map<std::string, int> index;
  for (size_t i = 0; i < dataset.label_names.size(); ++i) {
    index[dataset.label_names[i]] = static_cast<int>(i);
  }

  for (const Record& r : records) {
    std::vector<int> classes;
    bool known = true;
    for (const std::string& name : r.labels) {
      auto it = index.find(name);
      if (it == index.end()) {
        known = false;
        break;
      }
      classes.push_back(it->second);
    }
    if (!known) {
      ++loaded.dropped_samples;
      loaded.warnings.push_back("line " + std::to_string(r.line) +
                                ": label outside the inventory, sample dropped");
      continue;
    }
    std::vector<std::string> tokens =
        Tokenize(Preprocess(r.raw_text, spec.preprocess));
    if (tokens.empty()) {
      ++loaded.dropped_samples;
      loaded.warnings.push_back("line " + std::to_string(r.line) +
                                ": empty after preprocessing, sample dropped");
      continue;
    }
    if (static_cast<int>(tokens.size()) > spec.max_length) {
      tokens.resize(spec.max_length);
    }
    TextSample sample;
    sample.id = r.id;
    sample.tokens = std::move(tokens);
    sample.labels = LabelSet(std::move(classes), spec.task_mode);
    sample.raw_text = r.raw_text;
    dataset.samples.push_back(std::move(sample));
  }
  if (dataset.samples.empty()) throw ParseError("empty dataset", 0);
  return loaded;
}

LoadedDataset LoadDataset(const DatasetSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset: " + spec.path);
  std::ostringstream content;
  content << in.rdbuf();
  return ParseDataset(content.str(), spec);
}

Vocabulary BuildVocabulary(std::span<const TextSample> samples) {
  Vocabulary vocab;
  for (const TextSample& s : samples) {
    for (const std::string& token : s.tokens) vocab.Add(token);
  }
  return vocab;
}

void EncodeSamples(std::span<TextSample> samples, const Vocabulary& vocab) {
  for (TextSample& s : samples) {
    s.ids.resize(s.tokens.size());
    for (size_t i = 0; i < s.tokens.size(); ++i) s.ids[i] = vocab.Id(s.tokens[i]);
  }
}

DatasetSplit SplitDataset(std::span<const TextSample> samples, uint64_t seed,
                          int fold) {
  const int n = static_cast<int>(samples.size());
  if (n < 5) throw ConfigError("dataset too small to split (need at least 5)");
  if (fold < 0) throw ConfigError("fold must be non-negative");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int held_out = n / 5;
  std::rotate(order.begin(), order.begin() + (fold * held_out) % n, order.end());

  DatasetSplit split;
  for (int i = 0; i < n; ++i) {
    const TextSample& s = samples[order[i]];
    if (i < held_out) {
      split.test.push_back(s);
    } else if (i < 2 * held_out) {
      split.validation.push_back(s);
    } else {
      split.train.push_back(s);
    }
  }
  return split;
}

}  // namespace attrobust
