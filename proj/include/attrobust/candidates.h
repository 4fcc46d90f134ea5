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


#ifndef ATTROBUST_CANDIDATES_H_
#define ATTROBUST_CANDIDATES_H_

#include <functional>
#include <istream>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attrobust/errors.h"
#include "attrobust/text_sample.h"

namespace attrobust {

struct Candidate {
  std::string word;
  double score = 0.0;

  bool operator==(const Candidate&) const = default;
};

// Ranked substitution candidates for one position; scores non-increasing,
// no duplicates, never the original word.
struct CandidateSet {
  int position = 0;
  std::vector<Candidate> candidates;

  bool empty() const { return candidates.empty(); }
  int size() const { return static_cast<int>(candidates.size()); }
};

// Raised when an extractor cannot serve a position. Attacks skip the
// position and log it.
class ExtractorError : public Error {
 public:
  using Error::Error;
};

// Produces in-context replacement words for one position of a sample.
// Implementations must be safe for concurrent queries.
class CandidateExtractor {
 public:
  virtual ~CandidateExtractor() = default;
  virtual std::string name() const = 0;
  virtual std::string domain() const { return "general"; }
  // Up to `k` proposals, best first. May include the original word; the
  // normalization in ExtractCandidates removes it.
  virtual std::vector<Candidate> Propose(std::span<const std::string> tokens,
                                         int position, int k) const = 0;
};

// Validates the request, removes the original word and duplicates, orders by
// non-increasing score (stable) and truncates to `k`.
CandidateSet ExtractCandidates(const CandidateExtractor& extractor,
                               int position, const TextSample& sample, int k);

// Word -> ranked candidate list, loaded from `word<TAB>cand1,cand2,...`.
class SynonymTable : public CandidateExtractor {
 public:
  SynonymTable() = default;
  static SynonymTable Parse(std::istream& in);
  static SynonymTable Load(const std::string& path);

  // Inverse of Parse for well-formed input: byte-identical round trip.
  std::string Dump() const;
  void Save(const std::string& path) const;

  void Set(const std::string& word, std::vector<std::string> candidates);
  const std::vector<std::string>* Find(const std::string& word) const;
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<std::pair<std::string, std::vector<std::string>>>&
  entries() const {
    return entries_;
  }

  std::string name() const override { return "synonym-table"; }
  // Listed order; score 1/(rank+1).
  std::vector<Candidate> Propose(std::span<const std::string> tokens,
                                 int position, int k) const override;

 private:
  std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
  std::unordered_map<std::string, size_t> index_;
};

// Masked-prediction contract: the token at `masked_index` has already been
// replaced by the mask token. Returns up to `k` (word, score) pairs with
// non-increasing scores.
class MaskedLanguageModel {
 public:
  virtual ~MaskedLanguageModel() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Candidate> PredictMasked(
      std::span<const std::string> tokens, int masked_index, int k) const = 0;
};

// Context-free stub: ranks words by corpus frequency (ties alphabetical).
class UnigramLanguageModel : public MaskedLanguageModel {
 public:
  explicit UnigramLanguageModel(std::span<const TextSample> corpus);
  std::string name() const override { return "unigram"; }
  std::vector<Candidate> PredictMasked(std::span<const std::string> tokens,
                                       int masked_index, int k) const override;

 private:
  std::vector<Candidate> ranked_;  // relative frequency, best first
};

// Stub whose predictions come from a callback; used for scripted tests.
class ScriptedLanguageModel : public MaskedLanguageModel {
 public:
  using Script = std::function<std::vector<Candidate>(
      std::span<const std::string> tokens, int masked_index, int k)>;
  ScriptedLanguageModel(std::string name, Script script)
      : name_(std::move(name)), script_(std::move(script)) {}
  std::string name() const override { return name_; }
  std::vector<Candidate> PredictMasked(std::span<const std::string> tokens,
                                       int masked_index,
                                       int k) const override {
    return script_(tokens, masked_index, k);
  }

 private:
  std::string name_;
  Script script_;
};

// Talks to an external predictor process over stdin/stdout, one JSON object
// per line:
//   request:  {"tokens": [...], "masked_index": i, "k": k}
//   response: {"predictions": [["word", score], ...]}
// Requests are serialized through a mutex, so throughput is bounded by one
// in-flight query regardless of how many attack threads share the adapter.
class ProcessLanguageModel : public MaskedLanguageModel {
 public:
  // `argv[0]` is resolved through PATH.
  explicit ProcessLanguageModel(std::vector<std::string> argv);
  ~ProcessLanguageModel() override;
  ProcessLanguageModel(const ProcessLanguageModel&) = delete;
  ProcessLanguageModel& operator=(const ProcessLanguageModel&) = delete;

  std::string name() const override { return "process:" + argv_.front(); }
  std::vector<Candidate> PredictMasked(std::span<const std::string> tokens,
                                       int masked_index, int k) const override;

 private:
  std::vector<std::string> argv_;
  mutable std::mutex mutex_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::string buffer_;
};

// Adapts a masked LM to the extractor interface: masks the position and
// asks for k + 1 predictions so that dropping the original still leaves k.
class MaskedLmExtractor : public CandidateExtractor {
 public:
  explicit MaskedLmExtractor(const MaskedLanguageModel& lm) : lm_(lm) {}
  std::string name() const override { return "mlm:" + lm_.name(); }
  std::vector<Candidate> Propose(std::span<const std::string> tokens,
                                 int position, int k) const override;

 private:
  const MaskedLanguageModel& lm_;
};

struct Top5Accuracy {
  double micro = 0.0;  // hits / word occurrences
  double macro = 0.0;  // mean over samples of the per-sample hit rate
  long hits = 0;
  long total = 0;
};

// Masks every word of every sample in turn and counts a hit when the
// original word is among the top 5 predictions.
Top5Accuracy ComputeTop5Accuracy(const MaskedLanguageModel& lm,
                                 std::span<const TextSample> dataset);

}  // namespace attrobust

#endif  // ATTROBUST_CANDIDATES_H_
