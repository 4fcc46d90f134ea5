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


#include "attrobust/candidates.h"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

extern char** environ;

namespace attrobust {

CandidateSet ExtractCandidates(const CandidateExtractor& extractor,
                               int position, const TextSample& sample, int k) {
  if (position < 0 || position >= sample.size()) {
    throw LookupError("candidate position " + std::to_string(position) +
                      " outside sample of length " +
                      std::to_string(sample.size()));
  }
  if (k < 1) throw ConfigError("candidate count k must be at least 1");
  std::vector<Candidate> proposed;
  try {
    proposed = extractor.Propose(sample.tokens, position, k);
  } catch (const ExtractorError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExtractorError(extractor.name() + " failed at position " +
                         std::to_string(position) + ": " + e.what());
  }
  const std::string& original = sample.tokens[position];
  std::unordered_set<std::string> seen{original};
  CandidateSet out;
  out.position = position;
  for (Candidate& c : proposed) {
    if (c.word.empty() || !seen.insert(c.word).second) continue;
    out.candidates.push_back(std::move(c));
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score > b.score;
                   });
  if (out.size() > k) out.candidates.resize(k);
  return out;
}

// --- SynonymTable ----------------------------------------------------------

namespace {

bool IsLowercaseWord(const std::string& w) {
  if (w.empty()) return false;
  for (unsigned char c : w) {
    if (std::isupper(c) || std::isspace(c) || c == ',' || c == '\t') {
      return false;
    }
  }
  return true;
}

}  // namespace

SynonymTable SynonymTable::Parse(std::istream& in) {
  SynonymTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("missing tab separator in synonym table", line_no);
    }
    std::string word = line.substr(0, tab);
    if (!IsLowercaseWord(word)) {
      throw ParseError("invalid head word '" + word + "'", line_no);
    }
    std::vector<std::string> candidates;
    const std::string rest = line.substr(tab + 1);
    if (!rest.empty()) {
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!IsLowercaseWord(item)) {
          throw ParseError("invalid candidate '" + item + "'", line_no);
        }
        candidates.push_back(item);
      }
      if (rest.back() == ',') {
        throw ParseError("trailing comma in candidate list", line_no);
      }
    }
    if (table.Find(word) != nullptr) {
      throw ParseError("duplicate head word '" + word + "'", line_no);
    }
    table.Set(word, std::move(candidates));
  }
  return table;
}

SynonymTable SynonymTable::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open synonym table " + path);
  return Parse(in);
}

std::string SynonymTable::Dump() const {
  std::string out;
  for (const auto& [word, candidates] : entries_) {
    out += word;
    out += '\t';
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (i) out += ',';
      out += candidates[i];
    }
    out += '\n';
  }
  return out;
}

void SynonymTable::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write synonym table " + path);
  out << Dump();
}

void SynonymTable::Set(const std::string& word,
                       std::vector<std::string> candidates) {
  auto it = index_.find(word);
  if (it != index_.end()) {
    entries_[it->second].second = std::move(candidates);
    return;
  }
  index_.emplace(word, entries_.size());
  entries_.emplace_back(word, std::move(candidates));
}

const std::vector<std::string>* SynonymTable::Find(
    const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

std::vector<Candidate> SynonymTable::Propose(
    std::span<const std::string> tokens, int position, int k) const {
  std::vector<Candidate> out;
  const auto* list = Find(tokens[position]);
  if (list == nullptr) return out;
  for (size_t i = 0; i < list->size(); ++i) {
    if (static_cast<int>(out.size()) >= k + 1) break;
    out.push_back({(*list)[i], 1.0 / static_cast<double>(i + 1)});
  }
  return out;
}

// --- Language models -------------------------------------------------------

UnigramLanguageModel::UnigramLanguageModel(std::span<const TextSample> corpus) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const TextSample& s : corpus) {
    for (const std::string& t : s.tokens) {
      ++counts[t];
      ++total;
    }
  }
  for (const auto& [word, count] : counts) {
    ranked_.push_back({word, static_cast<double>(count) / std::max(1L, total)});
  }
  // std::map iterates alphabetically, so a stable sort keeps ties in order.
  std::stable_sort(ranked_.begin(), ranked_.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score > b.score;
                   });
}

std::vector<Candidate> UnigramLanguageModel::PredictMasked(
    std::span<const std::string>, int, int k) const {
  const size_t n = std::min(ranked_.size(), static_cast<size_t>(std::max(k, 0)));
  return {ranked_.begin(), ranked_.begin() + static_cast<long>(n)};
}

std::vector<Candidate> MaskedLmExtractor::Propose(
    std::span<const std::string> tokens, int position, int k) const {
  std::vector<std::string> masked(tokens.begin(), tokens.end());
  masked[position] = std::string(Vocabulary::kMaskToken);
  return lm_.PredictMasked(masked, position, k + 1);
}

ProcessLanguageModel::ProcessLanguageModel(std::vector<std::string> argv)
    : argv_(std::move(argv)) {
  if (argv_.empty()) throw ConfigError("empty predictor command");
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw ExtractorError("cannot create pipes for predictor process");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  std::vector<char*> args;
  for (std::string& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  pid_t pid;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(),
                              environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw ExtractorError("cannot start predictor '" + argv_.front() + "'");
  }
  signal(SIGPIPE, SIG_IGN);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ProcessLanguageModel::~ProcessLanguageModel() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

std::vector<Candidate> ProcessLanguageModel::PredictMasked(
    std::span<const std::string> tokens, int masked_index, int k) const {
  std::lock_guard<std::mutex> lock(mutex_);
  nlohmann::json request;
  request["tokens"] = std::vector<std::string>(tokens.begin(), tokens.end());
  request["masked_index"] = masked_index;
  request["k"] = k;
  const std::string line = request.dump() + "\n";
  size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = write(to_child_, line.data() + written,
                            line.size() - written);
    if (n <= 0) throw ExtractorError("predictor process closed its input");
    written += static_cast<size_t>(n);
  }
  size_t newline;
  while ((newline = buffer_.find('\n')) == std::string::npos) {
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n <= 0) throw ExtractorError("predictor process closed its output");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
  const std::string response_line = buffer_.substr(0, newline);
  buffer_.erase(0, newline + 1);
  std::vector<Candidate> out;
  try {
    const auto response = nlohmann::json::parse(response_line);
    for (const auto& p : response.at("predictions")) {
      out.push_back({p.at(0).get<std::string>(), p.at(1).get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ExtractorError(std::string("malformed predictor response: ") +
                         e.what());
  }
  for (size_t i = 1; i < out.size(); ++i) {
    if (out[i].score > out[i - 1].score) {
      throw ExtractorError("predictor scores are not non-increasing");
    }
  }
  if (static_cast<int>(out.size()) > k) out.resize(k);
  return out;
}

Top5Accuracy ComputeTop5Accuracy(const MaskedLanguageModel& lm,
                                 std::span<const TextSample> dataset) {
  if (dataset.empty()) throw ConfigError("top-5 accuracy of an empty dataset");
  Top5Accuracy result;
  double per_sample_sum = 0.0;
  int samples_with_words = 0;
  for (const TextSample& sample : dataset) {
    const int length = static_cast<int>(sample.tokens.size());
    long hits = 0;
    for (int i = 0; i < length; ++i) {
      std::vector<std::string> masked = sample.tokens;
      masked[i] = std::string(Vocabulary::kMaskToken);
      const auto predictions = lm.PredictMasked(masked, i, 5);
      const size_t limit = std::min<size_t>(5, predictions.size());
      for (size_t j = 0; j < limit; ++j) {
        if (predictions[j].word == sample.tokens[i]) {
          ++hits;
          break;
        }
      }
    }
    result.hits += hits;
    result.total += length;
    if (length > 0) {
      per_sample_sum += static_cast<double>(hits) / length;
      ++samples_with_words;
    }
  }
  if (result.total == 0) throw ConfigError("top-5 accuracy: no words");
  result.micro = static_cast<double>(result.hits) / result.total;
  result.macro = per_sample_sum / samples_with_words;
  return result;
}

}  // namespace attrobust
